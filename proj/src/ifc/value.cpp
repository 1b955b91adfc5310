#include "mvd/ifc/value.hpp"

namespace mvd::ifc {

const char* to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Unset: return "unset";
        case ValueKind::Derived: return "derived";
        case ValueKind::Integer: return "integer";
        case ValueKind::Real: return "real";
        case ValueKind::Text: return "string";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::Logical: return "logical";
        case ValueKind::Enum: return "enum";
        case ValueKind::Binary: return "binary";
        case ValueKind::Reference: return "reference";
        case ValueKind::List: return "list";
        case ValueKind::Typed: return "typed";
    }
    return "?";
}

Value Value::clone() const {
    switch (kind()) {
        case ValueKind::Unset: return Value(UnsetValue{});
        case ValueKind::Derived: return Value(DerivedValue{});
        case ValueKind::Integer: return Value(as_int());
        case ValueKind::Real: return Value(as_real());
        case ValueKind::Text: return Value(std::string(as_text()));
        case ValueKind::Boolean: return Value(as_bool());
        case ValueKind::Logical: return Value(LogicalUnknown{});
        case ValueKind::Enum: return Value(EnumToken(as_enum()));
        case ValueKind::Binary: return Value(BinaryData(as_binary()));
        case ValueKind::Reference: return Value(as_reference());
        case ValueKind::List: {
            List copy;
            copy.reserve(as_list().size());
            for (const Value& v : as_list()) copy.push_back(v.clone());
            return Value(std::move(copy));
        }
        case ValueKind::Typed:
            return make_typed(as_typed().type_name, as_typed().inner.clone());
    }
    return Value();
}

bool Value::structurally_equal(const Value& other) const {
    if (kind() != other.kind()) return false;
    switch (kind()) {
        case ValueKind::Unset:
        case ValueKind::Derived:
        case ValueKind::Logical:
            return true;
        case ValueKind::Integer: return as_int() == other.as_int();
        case ValueKind::Real: return as_real() == other.as_real();
        case ValueKind::Text: return as_text() == other.as_text();
        case ValueKind::Boolean: return as_bool() == other.as_bool();
        case ValueKind::Enum: return as_enum() == other.as_enum();
        case ValueKind::Binary: return as_binary() == other.as_binary();
        case ValueKind::Reference: return as_reference() == other.as_reference();
        case ValueKind::List: {
            const List& a = as_list();
            const List& b = other.as_list();
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!a[i].structurally_equal(b[i])) return false;
            return true;
        }
        case ValueKind::Typed:
            return as_typed().type_name == other.as_typed().type_name &&
                   as_typed().inner.structurally_equal(other.as_typed().inner);
    }
    return false;
}

}  // namespace mvd::ifc
