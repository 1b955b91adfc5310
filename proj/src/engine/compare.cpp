#include "mvd/engine/compare.hpp"

#include <cmath>

#include "mvd/lang/lexer.hpp"  // iequals

namespace mvd::engine {

namespace {

Ordering order_numeric(double a, double b, double epsilon) {
    if (std::isnan(a) || std::isnan(b)) return Ordering::Unordered;
    if (std::fabs(a - b) <= epsilon) return Ordering::Equal;
    return a < b ? Ordering::Less : Ordering::Greater;
}

Ordering order_strings(const std::string& a, const std::string& b) {
    int c = a.compare(b);
    if (c == 0) return Ordering::Equal;
    return c < 0 ? Ordering::Less : Ordering::Greater;
}

Ordering order_tokens(std::string_view a, std::string_view b) {
    return lang::iequals(a, b) ? Ordering::Equal : Ordering::Distinct;
}

}  // namespace

Ordering compare_value(const ifc::Value& value, const lang::Literal& lit, double epsilon) {
    const ifc::Value* v = &value;
    while (v->is(ifc::ValueKind::Typed)) v = &v->as_typed().inner;

    using LK = lang::Literal::Kind;
    switch (v->kind()) {
        case ifc::ValueKind::Integer:
            if (lit.kind == LK::Int)
                return order_numeric(static_cast<double>(v->as_int()),
                                     static_cast<double>(lit.ival), 0.0);
            if (lit.kind == LK::Real)
                return order_numeric(static_cast<double>(v->as_int()), lit.rval, epsilon);
            return Ordering::Unordered;
        case ifc::ValueKind::Real:
            if (lit.kind == LK::Int)
                return order_numeric(v->as_real(), static_cast<double>(lit.ival), epsilon);
            if (lit.kind == LK::Real) return order_numeric(v->as_real(), lit.rval, epsilon);
            return Ordering::Unordered;
        case ifc::ValueKind::Text:
            if (lit.kind == LK::String) return order_strings(v->as_text(), lit.text);
            if (lit.kind == LK::Name) return order_tokens(v->as_text(), lit.text);
            return Ordering::Unordered;
        case ifc::ValueKind::Boolean:
            if (lit.kind == LK::Bool)
                return v->as_bool() == lit.bval ? Ordering::Equal : Ordering::Distinct;
            return Ordering::Unordered;
        case ifc::ValueKind::Logical:
            // .U. — unknown: only the UNKNOWN token matches it
            if (lit.kind == LK::Name && lang::iequals(lit.text, "UNKNOWN")) return Ordering::Equal;
            if (lit.kind == LK::Bool) return Ordering::Distinct;
            return Ordering::Unordered;
        case ifc::ValueKind::Enum:
            if (lit.kind == LK::Name || lit.kind == LK::String)
                return order_tokens(v->as_enum().token, lit.text);
            if (lit.kind == LK::Bool)
                return order_tokens(v->as_enum().token, lit.bval ? "TRUE" : "FALSE");
            return Ordering::Unordered;
        case ifc::ValueKind::Unset:
        case ifc::ValueKind::Derived:
        case ifc::ValueKind::Binary:
        case ifc::ValueKind::Reference:
        case ifc::ValueKind::List:
        case ifc::ValueKind::Typed:
            return Ordering::Unordered;
    }
    return Ordering::Unordered;
}

bool satisfies(lang::Cmp cmp, Ordering o) {
    switch (cmp) {
        case lang::Cmp::Eq: return o == Ordering::Equal;
        case lang::Cmp::Ne:
            return o == Ordering::Less || o == Ordering::Greater || o == Ordering::Distinct;
        case lang::Cmp::Lt: return o == Ordering::Less;
        case lang::Cmp::Gt: return o == Ordering::Greater;
        case lang::Cmp::Le: return o == Ordering::Less || o == Ordering::Equal;
        case lang::Cmp::Ge: return o == Ordering::Greater || o == Ordering::Equal;
    }
    return false;
}

}  // namespace mvd::engine
