#include <charconv>
#include <cstdio>
#include <fstream>

#include "mvd/ifc/spf.hpp"

namespace mvd::ifc {

namespace {

void append_real(std::string& out, double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    std::string_view s(buf, static_cast<std::size_t>(p - buf));
    bool has_point = false;
    for (char c : s) {
        if (c == '.') has_point = true;
        if (c == 'e') {
            // STEP wants an upper-case exponent and a decimal point.
            if (!has_point) {
                out.append(s.substr(0, static_cast<std::size_t>(&c - s.data())));
                out.push_back('.');
                out.push_back('E');
            } else {
                out.append(s.substr(0, static_cast<std::size_t>(&c - s.data())));
                out.push_back('E');
            }
            out.append(s.substr(static_cast<std::size_t>(&c - s.data()) + 1));
            return;
        }
    }
    out.append(s);
    if (!has_point) out.push_back('.');
}

void append_value(std::string& out, const Value& v) {
    switch (v.kind()) {
        case ValueKind::Unset: out.push_back('$'); break;
        case ValueKind::Derived: out.push_back('*'); break;
        case ValueKind::Integer: out += std::to_string(v.as_int()); break;
        case ValueKind::Real: append_real(out, v.as_real()); break;
        case ValueKind::Text:
            out.push_back('\'');
            out += encode_step_string(v.as_text());
            out.push_back('\'');
            break;
        case ValueKind::Boolean: out += v.as_bool() ? ".T." : ".F."; break;
        case ValueKind::Logical: out += ".U."; break;
        case ValueKind::Enum:
            out.push_back('.');
            out += v.as_enum().token;
            out.push_back('.');
            break;
        case ValueKind::Binary:
            out.push_back('"');
            out += v.as_binary().text;
            out.push_back('"');
            break;
        case ValueKind::Reference:
            out.push_back('#');
            out += std::to_string(v.as_reference().id);
            break;
        case ValueKind::List: {
            out.push_back('(');
            bool first = true;
            for (const Value& item : v.as_list()) {
                if (!first) out.push_back(',');
                first = false;
                append_value(out, item);
            }
            out.push_back(')');
            break;
        }
        case ValueKind::Typed:
            out += v.as_typed().type_name;
            out.push_back('(');
            append_value(out, v.as_typed().inner);
            out.push_back(')');
            break;
    }
}

void append_text_list(std::string& out, const std::vector<std::string>& items) {
    out.push_back('(');
    bool first = true;
    for (const std::string& s : items) {
        if (!first) out.push_back(',');
        first = false;
        out.push_back('\'');
        out += encode_step_string(s);
        out.push_back('\'');
    }
    out.push_back(')');
}

void append_quoted(std::string& out, const std::string& s) {
    out.push_back('\'');
    out += encode_step_string(s);
    out.push_back('\'');
}

std::string upper_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return out;
}

}  // namespace

std::string write_spf_text(const Model& model) {
    const FileHeader& h = model.header;
    std::string out;
    out.reserve(model.size() * 64 + 512);
    out += "ISO-10303-21;\nHEADER;\nFILE_DESCRIPTION(";
    append_text_list(out, h.description.empty() ? std::vector<std::string>{""} : h.description);
    out.push_back(',');
    append_quoted(out, h.implementation_level.empty() ? "2;1" : h.implementation_level);
    out += ");\nFILE_NAME(";
    append_quoted(out, h.name);
    out.push_back(',');
    append_quoted(out, h.timestamp.empty() ? "2026-01-01T00:00:00" : h.timestamp);
    out.push_back(',');
    append_text_list(out, h.author.empty() ? std::vector<std::string>{""} : h.author);
    out.push_back(',');
    append_text_list(out, h.organization.empty() ? std::vector<std::string>{""} : h.organization);
    out.push_back(',');
    append_quoted(out, h.preprocessor_version);
    out.push_back(',');
    append_quoted(out, h.originating_system);
    out.push_back(',');
    append_quoted(out, h.authorization);
    out += ");\nFILE_SCHEMA((";
    if (h.schema_identifiers.empty()) {
        append_quoted(out, model.schema().schema_id());
    } else {
        bool first = true;
        for (const std::string& s : h.schema_identifiers) {
            if (!first) out.push_back(',');
            first = false;
            append_quoted(out, s);
        }
    }
    out += "));\nENDSEC;\nDATA;\n";
    for (const Instance& inst : model.instances()) {
        out.push_back('#');
        out += std::to_string(inst.id);
        out.push_back('=');
        out += upper_ascii(model.schema().entity(inst.entity).name);  // STEP convention
        out.push_back('(');
        bool first = true;
        for (const Value& v : inst.attributes) {
            if (!first) out.push_back(',');
            first = false;
            append_value(out, v);
        }
        out += ");\n";
    }
    out += "ENDSEC;\nEND-ISO-10303-21;\n";
    return out;
}

void write_spf_file(const Model& model, const std::string& path) {
    std::ofstream outstream(path, std::ios::binary);
    if (!outstream) throw ModelError("cannot write model file: " + path);
    std::string text = write_spf_text(model);
    outstream.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!outstream) throw ModelError("short write to " + path);
}

}  // namespace mvd::ifc
