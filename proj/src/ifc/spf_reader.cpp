// STEP physical file reader.  Single pass over an in-memory buffer; the
// grammar is small enough that a hand-rolled scanner keeps both the error
// messages and the throughput under control (large models are parsed in
// one gulp, so this path is hot).

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mvd/ifc/spf.hpp"

namespace mvd::ifc {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::uint32_t parse_hex(std::string_view s, std::size_t pos, std::size_t count, std::size_t line) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        int d = pos + i < s.size() ? hex_digit(s[pos + i]) : -1;
        if (d < 0) throw ModelError("bad hex digits in string escape", line);
        v = v * 16 + static_cast<std::uint32_t>(d);
    }
    return v;
}

}  // namespace

std::string decode_step_string(std::string_view raw, std::size_t line) {
    std::string out;
    out.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        char c = raw[i];
        if (c == '\'') {
            // Only '' reaches us (the scanner stops at a single quote).
            out.push_back('\'');
            i += 2;
        } else if (c != '\\') {
            out.push_back(c);
            ++i;
        } else if (raw.compare(i, 2, "\\\\") == 0) {
            out.push_back('\\');
            i += 2;
        } else if (raw.compare(i, 3, "\\S\\") == 0) {
            if (i + 3 >= raw.size()) throw ModelError("truncated \\S\\ escape", line);
            append_utf8(out, static_cast<unsigned char>(raw[i + 3]) + 0x80);
            i += 4;
        } else if (raw.compare(i, 3, "\\X\\") == 0) {
            append_utf8(out, parse_hex(raw, i + 3, 2, line));
            i += 5;
        } else if (raw.compare(i, 4, "\\X2\\") == 0 || raw.compare(i, 4, "\\X4\\") == 0) {
            const std::size_t width = raw[i + 2] == '2' ? 4 : 8;
            i += 4;
            std::uint32_t pending_high = 0;
            while (raw.compare(i, 4, "\\X0\\") != 0) {
                if (i + width > raw.size()) throw ModelError("unterminated \\X escape", line);
                std::uint32_t cp = parse_hex(raw, i, width, line);
                if (width == 4 && cp >= 0xD800 && cp <= 0xDBFF) {
                    pending_high = cp;
                } else if (width == 4 && cp >= 0xDC00 && cp <= 0xDFFF && pending_high) {
                    append_utf8(out, 0x10000 + ((pending_high - 0xD800) << 10) + (cp - 0xDC00));
                    pending_high = 0;
                } else {
                    append_utf8(out, cp);
                }
                i += width;
            }
            i += 4;
        } else if (raw.compare(i, 2, "\\P") == 0 && i + 3 < raw.size() && raw[i + 3] == '\\') {
            i += 4;  // code-page directive; \S\ bytes always decode as ISO 8859-1 here
        } else {
            // Unknown escape: keep it verbatim rather than failing the file.
            out.push_back(c);
            ++i;
        }
    }
    return out;
}

std::string encode_step_string(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        unsigned char c = static_cast<unsigned char>(utf8[i]);
        if (c == '\'') {
            out += "''";
            ++i;
        } else if (c == '\\') {
            out += "\\\\";
            ++i;
        } else if (c >= 0x20 && c <= 0x7E) {
            out.push_back(static_cast<char>(c));
            ++i;
        } else {
            // Decode one UTF-8 code point, then emit a \X2\ or \X4\ run.
            std::uint32_t cp = 0;
            std::size_t len = 1;
            if ((c & 0x80) == 0) {
                cp = c;
            } else if ((c & 0xE0) == 0xC0) {
                cp = c & 0x1F;
                len = 2;
            } else if ((c & 0xF0) == 0xE0) {
                cp = c & 0x0F;
                len = 3;
            } else {
                cp = c & 0x07;
                len = 4;
            }
            if (i + len > utf8.size()) len = 1, cp = c;  // invalid UTF-8: pass through byte
            for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (utf8[i + k] & 0x3F);
            i += len;
            char buf[20];
            if (cp <= 0xFFFF) {
                std::snprintf(buf, sizeof buf, "\\X2\\%04X\\X0\\", cp);
            } else {
                std::snprintf(buf, sizeof buf, "\\X4\\%08X\\X0\\", cp);
            }
            out += buf;
        }
    }
    return out;
}

namespace {

class Scanner {
public:
    Scanner(std::string_view text, const std::string& origin) : text_(text), origin_(origin) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ModelError(origin_ + ":" + std::to_string(line_) + ": " + msg, line_);
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                std::size_t end = text_.find("*/", pos_ + 2);
                if (end == std::string_view::npos) fail("unterminated comment");
                for (std::size_t i = pos_; i < end; ++i)
                    if (text_[i] == '\n') ++line_;
                pos_ = end + 2;
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    // Keyword / entity name: [A-Z0-9_-]+ (STEP keywords are upper case).
    std::string_view keyword() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
                ++pos_;
            else
                break;
        }
        if (pos_ == start) fail("expected a keyword");
        return text_.substr(start, pos_ - start);
    }

    std::uint64_t integer_after_hash() {
        std::uint64_t v = 0;
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            v = v * 10 + static_cast<std::uint64_t>(text_[pos_++] - '0');
        if (pos_ == start) fail("expected an instance number after '#'");
        return v;
    }

    Value value() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of file in a value");
        char c = text_[pos_];
        switch (c) {
            case '$':
                ++pos_;
                return Value(UnsetValue{});
            case '*':
                ++pos_;
                return Value(DerivedValue{});
            case '#': {
                ++pos_;
                std::uint64_t id = integer_after_hash();
                if (id == 0 || id > 0xFFFFFFFFull) fail("instance id out of range");
                return Value(Reference{static_cast<std::uint32_t>(id)});
            }
            case '\'':
                return string_value();
            case '.':
                return enum_value();
            case '(': {
                ++pos_;
                Value::List items;
                if (!accept(')')) {
                    while (true) {
                        items.push_back(value());
                        if (accept(')')) break;
                        expect(',');
                    }
                }
                return Value(std::move(items));
            }
            case '"': {  // binary literal: "0A1F"
                std::size_t end = text_.find('"', pos_ + 1);
                if (end == std::string_view::npos) fail("unterminated binary literal");
                BinaryData bin{std::string(text_.substr(pos_ + 1, end - pos_ - 1))};
                pos_ = end + 1;
                return Value(std::move(bin));
            }
            default:
                break;
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) return number_value();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string type(keyword());
            expect('(');
            Value inner = value();
            expect(')');
            return make_typed(std::move(type), std::move(inner));
        }
        fail(std::string("unexpected character '") + c + "' in a value");
    }

    std::size_t line() const { return line_; }

private:
    Value string_value() {
        ++pos_;  // opening quote
        std::size_t start = pos_;
        bool has_escape = false;
        while (true) {
            if (pos_ >= text_.size()) fail("unterminated string");
            char c = text_[pos_];
            if (c == '\'') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
                    has_escape = true;
                    pos_ += 2;
                    continue;
                }
                break;
            }
            if (c == '\\') has_escape = true;
            if (c == '\n') ++line_;
            ++pos_;
        }
        std::string_view raw = text_.substr(start, pos_ - start);
        ++pos_;  // closing quote
        if (!has_escape) return Value(std::string(raw));
        return Value(decode_step_string(raw, line_));
    }

    Value enum_value() {
        std::size_t end = text_.find('.', pos_ + 1);
        if (end == std::string_view::npos) fail("unterminated enum literal");
        std::string_view token = text_.substr(pos_ + 1, end - pos_ - 1);
        pos_ = end + 1;
        if (token == "T") return Value(true);
        if (token == "F") return Value(false);
        if (token == "U") return Value(LogicalUnknown{});
        return Value(EnumToken{std::string(token)});
    }

    Value number_value() {
        std::size_t start = pos_;
        if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
        bool is_real = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '.' || c == 'e' || c == 'E') {
                // a '.' directly followed by a letter is the start of an enum
                // literal glued to an integer; cannot happen in valid files.
                is_real = true;
                ++pos_;
                if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
            } else {
                break;
            }
        }
        std::string_view digits = text_.substr(start, pos_ - start);
        if (!is_real) {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            if (ec != std::errc() || p != digits.data() + digits.size())
                fail("bad integer literal '" + std::string(digits) + "'");
            return Value(v);
        }
        double d = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
        if (ec != std::errc() || p != digits.data() + digits.size())
            fail("bad real literal '" + std::string(digits) + "'");
        return Value(d);
    }

    std::string_view text_;
    std::string origin_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

std::string text_of(const Value& v, const char* what, std::size_t line) {
    if (v.is(ValueKind::Text)) return v.as_text();
    if (v.is(ValueKind::Unset)) return {};
    throw ModelError(std::string("header field ") + what + " must be a string", line);
}

std::vector<std::string> list_of_text(const Value& v, const char* what, std::size_t line) {
    std::vector<std::string> out;
    if (!v.is(ValueKind::List)) throw ModelError(std::string("header field ") + what + " must be a list", line);
    for (const Value& item : v.as_list()) out.push_back(text_of(item, what, line));
    return out;
}

FileHeader read_header(Scanner& scan) {
    FileHeader header;
    while (true) {
        std::string_view kw = scan.keyword();
        if (kw == "ENDSEC") {
            scan.expect(';');
            return header;
        }
        scan.expect('(');
        Value::List args;
        if (!scan.accept(')')) {
            while (true) {
                args.push_back(scan.value());
                if (scan.accept(')')) break;
                scan.expect(',');
            }
        }
        scan.expect(';');
        std::size_t line = scan.line();
        auto arg = [&](std::size_t i) -> const Value& {
            static const Value unset;
            return i < args.size() ? args[i] : unset;
        };
        if (kw == "FILE_DESCRIPTION") {
            header.description = list_of_text(arg(0), "description", line);
            header.implementation_level = text_of(arg(1), "implementation_level", line);
        } else if (kw == "FILE_NAME") {
            header.name = text_of(arg(0), "name", line);
            header.timestamp = text_of(arg(1), "time_stamp", line);
            header.author = list_of_text(arg(2), "author", line);
            header.organization = list_of_text(arg(3), "organization", line);
            header.preprocessor_version = text_of(arg(4), "preprocessor_version", line);
            header.originating_system = text_of(arg(5), "originating_system", line);
            header.authorization = text_of(arg(6), "authorization", line);
        } else if (kw == "FILE_SCHEMA") {
            header.schema_identifiers = list_of_text(arg(0), "schema_identifiers", line);
        }
        // Unknown header entries (FILE_POPULATION, ...) are skipped.
    }
}

}  // namespace

Model read_spf_text(std::string_view text, SchemaRepository& schemas,
                    const SpfReadOptions& options, const std::string& origin) {
    Scanner scan(text, origin);
    if (scan.keyword() != "ISO-10303-21") scan.fail("file does not start with ISO-10303-21");
    scan.expect(';');
    if (scan.keyword() != "HEADER") scan.fail("expected HEADER section");
    scan.expect(';');
    FileHeader header = read_header(scan);

    std::string schema_id = options.schema_override;
    if (schema_id.empty()) {
        if (header.schema_identifiers.empty())
            scan.fail("FILE_SCHEMA names no schema and no override was given");
        schema_id = header.schema_identifiers.front();
    }
    const SchemaTable& schema = schemas.get(schema_id);

    Model model(schema);
    model.header = std::move(header);
    // Cheap size hint: one instance per ~48 bytes of DATA is a safe floor.
    model.reserve(text.size() / 96);

    if (scan.keyword() != "DATA") scan.fail("expected DATA section");
    scan.expect(';');

    while (true) {
        if (scan.accept('#')) {
            std::uint64_t id = scan.integer_after_hash();
            if (id == 0 || id > 0xFFFFFFFFull) scan.fail("instance id out of range");
            scan.expect('=');
            std::size_t at_line = scan.line();
            std::string_view name = scan.keyword();
            auto entity = schema.entity_index(name);
            if (!entity)
                throw ModelError(origin + ":" + std::to_string(at_line) + ": unknown entity " +
                                     std::string(name) + " for schema " + schema.schema_id(),
                                 at_line);
            Instance& inst = model.add_instance(static_cast<std::uint32_t>(id), *entity);
            scan.expect('(');
            if (!scan.accept(')')) {
                while (true) {
                    inst.attributes.push_back(scan.value());
                    if (scan.accept(')')) break;
                    scan.expect(',');
                }
            }
            scan.expect(';');
            const std::size_t expected = schema.entity(*entity).effective_attributes.size();
            if (inst.attributes.size() != expected)
                throw ModelError(origin + ":" + std::to_string(at_line) + ": " + std::string(name) +
                                     " #" + std::to_string(id) + " has " +
                                     std::to_string(inst.attributes.size()) + " attributes, schema "
                                     "expects " + std::to_string(expected),
                                 at_line);
            continue;
        }
        std::string_view kw = scan.keyword();
        if (kw == "ENDSEC") {
            scan.expect(';');
            break;
        }
        scan.fail("expected an instance or ENDSEC in DATA section");
    }
    if (scan.keyword() != "END-ISO-10303-21") scan.fail("missing END-ISO-10303-21");
    scan.expect(';');

    try {
        model.finalize();
    } catch (const ModelError& e) {
        throw ModelError(origin + ": " + e.what());
    }
    return model;
}

Model read_spf_file(const std::string& path, SchemaRepository& schemas,
                    const SpfReadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_spf_text(buf.str(), schemas, options, path);
}

}  // namespace mvd::ifc
