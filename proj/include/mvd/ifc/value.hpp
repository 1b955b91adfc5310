#pragma once

// Attribute values of STEP instances.  A Value is a small tagged union;
// lists own their elements, typed values (IFCBOOLEAN(.T.)) box the inner
// value behind a unique_ptr so the variant itself stays compact.

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mvd::ifc {

enum class ValueKind : std::uint8_t {
    Unset,     // $
    Derived,   // *
    Integer,
    Real,
    Text,
    Boolean,
    Logical,   // only .U. lands here; .T./.F. parse as Boolean
    Enum,
    Binary,
    Reference,
    List,
    Typed,
};

struct UnsetValue {
    bool operator==(const UnsetValue&) const = default;
};
struct DerivedValue {
    bool operator==(const DerivedValue&) const = default;
};
struct LogicalUnknown {
    bool operator==(const LogicalUnknown&) const = default;
};
struct EnumToken {
    std::string token;  // without the enclosing dots
    bool operator==(const EnumToken&) const = default;
};
struct BinaryData {
    std::string text;  // raw hex payload, e.g. "0A1F"
    bool operator==(const BinaryData&) const = default;
};
struct Reference {
    std::uint32_t id = 0;
    bool operator==(const Reference&) const = default;
};

struct TypedValue;

class Value {
public:
    using List = std::vector<Value>;
    using Storage = std::variant<UnsetValue, DerivedValue, std::int64_t, double, std::string,
                                 bool, LogicalUnknown, EnumToken, BinaryData, Reference, List,
                                 std::unique_ptr<TypedValue>>;

    Value() : data_(UnsetValue{}) {}
    Value(UnsetValue v) : data_(v) {}
    Value(DerivedValue v) : data_(v) {}
    Value(std::int64_t v) : data_(v) {}
    Value(double v) : data_(v) {}
    Value(std::string v) : data_(std::move(v)) {}
    Value(bool v) : data_(v) {}
    Value(LogicalUnknown v) : data_(v) {}
    Value(EnumToken v) : data_(std::move(v)) {}
    Value(BinaryData v) : data_(std::move(v)) {}
    Value(Reference v) : data_(v) {}
    Value(List v) : data_(std::move(v)) {}
    Value(std::unique_ptr<TypedValue> v) : data_(std::move(v)) {}

    Value(Value&&) noexcept = default;
    Value& operator=(Value&&) noexcept = default;
    Value(const Value&) = delete;
    Value& operator=(const Value&) = delete;

    ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }
    bool is(ValueKind k) const { return kind() == k; }

    std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    double as_real() const { return std::get<double>(data_); }
    const std::string& as_text() const { return std::get<std::string>(data_); }
    bool as_bool() const { return std::get<bool>(data_); }
    const EnumToken& as_enum() const { return std::get<EnumToken>(data_); }
    const BinaryData& as_binary() const { return std::get<BinaryData>(data_); }
    Reference as_reference() const { return std::get<Reference>(data_); }
    const List& as_list() const { return std::get<List>(data_); }
    List& as_list() { return std::get<List>(data_); }
    const TypedValue& as_typed() const { return *std::get<std::unique_ptr<TypedValue>>(data_); }

    Value clone() const;
    bool structurally_equal(const Value& other) const;

private:
    Storage data_;
};

struct TypedValue {
    std::string type_name;  // canonical spelling from the file, e.g. IFCBOOLEAN
    Value inner;
};

inline Value make_typed(std::string type_name, Value inner) {
    auto boxed = std::make_unique<TypedValue>();
    boxed->type_name = std::move(type_name);
    boxed->inner = std::move(inner);
    return Value(std::move(boxed));
}

const char* to_string(ValueKind kind);

}  // namespace mvd::ifc
