#include "pmrd/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "pmrd/errors.hpp"

namespace pmrd {

namespace {

struct Value {
    enum class Kind { Number, String, Bool, Array };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::string string;
    bool boolean = false;
    std::vector<Value> items;

    const char* kind_name() const {
        switch (kind) {
            case Kind::Number: return "number";
            case Kind::String: return "string";
            case Kind::Bool: return "boolean";
            case Kind::Array: return "array";
        }
        return "value";
    }
};

struct Entry {
    Value value;
    int line = 0;
    bool used = false;
};

struct Section {
    int line = 0;
    std::map<std::string, Entry> entries;
};

bool known_section(const std::string& name) {
    return name == "system" || name == "grid" || name == "initial" || name == "run" || name == "diagnostics";
}

// ---------------------------------------------------------------------------
// Lexing of one (possibly continued) logical line.

class ValueParser {
public:
    ValueParser(const std::string& text, int line) : s_(text), line_(line) {}

    Value parse() {
        Value v = value();
        skip();
        if (pos_ != s_.size()) fail("trailing characters after value");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    Value value() {
        skip();
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        if (c == '"') return string();
        if (c == '[') return array();
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            Value v;
            v.kind = Value::Kind::Bool;
            v.boolean = true;
            return v;
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            Value v;
            v.kind = Value::Kind::Bool;
            return v;
        }
        return number();
    }

    Value number() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                    s_[pos_] == '+' || s_[pos_] == '-' || s_[pos_] == '_'))
            ++pos_;
        std::string token = s_.substr(start, pos_ - start);
        std::erase(token, '_');
        if (token.empty()) fail("expected a value");
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v)) fail("malformed number '" + token + "'");
        Value out;
        out.number = v;
        return out;
    }

    Value string() {
        ++pos_;
        Value out;
        out.kind = Value::Kind::String;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            char c = s_[pos_++];
            if (c == '\\') {
                if (pos_ >= s_.size()) break;
                const char e = s_[pos_++];
                switch (e) {
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            }
            out.string.push_back(c);
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    Value array() {
        ++pos_;
        Value out;
        out.kind = Value::Kind::Array;
        skip();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return out;
        }
        for (;;) {
            out.items.push_back(value());
            skip();
            if (pos_ >= s_.size()) fail("unterminated array");
            if (s_[pos_] == ',') {
                ++pos_;
                skip();
                if (pos_ < s_.size() && s_[pos_] == ']') {  // trailing comma
                    ++pos_;
                    return out;
                }
                continue;
            }
            if (s_[pos_] == ']') {
                ++pos_;
                return out;
            }
            fail("expected ',' or ']' in array");
        }
    }

    const std::string& s_;
    int line_;
    std::size_t pos_ = 0;
};

// Removes a trailing comment and reports the bracket balance, both outside strings.
std::string strip_comment(const std::string& line, int& depth) {
    bool in_string = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (in_string) {
            if (c == '\\') ++k;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '#') return line.substr(0, k);
        else if (c == '[') ++depth;
        else if (c == ']') --depth;
    }
    return line;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

struct Document {
    std::map<std::string, Section> sections;
    int last_line = 0;
};

Document read_document(std::istream& in) {
    Document doc;
    std::string raw;
    int line_no = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        int depth = 0;
        std::string line = trim(strip_comment(raw, depth));
        if (line.empty()) continue;

        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']') throw ConfigError("malformed section header", line_no);
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!known_section(name)) throw ConfigError("unknown section [" + name + "]", line_no);
            if (doc.sections.count(name)) throw ConfigError("duplicate section [" + name + "]", line_no);
            current = &doc.sections[name];
            current->line = line_no;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        if (!current) throw ConfigError("key outside of any section", line_no);
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'", line_no);
        std::string text = line.substr(eq + 1);

        // Arrays may continue over several lines until the brackets balance.
        const int start_line = line_no;
        while (depth > 0) {
            if (!std::getline(in, raw)) throw ConfigError("unterminated array", start_line);
            ++line_no;
            text += " " + trim(strip_comment(raw, depth));
        }
        if (depth < 0) throw ConfigError("unbalanced ']'", line_no);

        if (current->entries.count(key)) throw ConfigError("duplicate key '" + key + "'", start_line);
        current->entries[key] = Entry{ValueParser(text, start_line).parse(), start_line, false};
    }
    doc.last_line = line_no;
    return doc;
}

// ---------------------------------------------------------------------------
// Typed access with "every key must be consumed" bookkeeping.

class Reader {
public:
    Reader(Section& sec, std::string name) : sec_(sec), name_(std::move(name)) {}

    int line() const { return sec_.line; }
    bool has(const std::string& key) const { return sec_.entries.count(key) != 0; }
    int line_of(const std::string& key) const { return sec_.entries.at(key).line; }

    const Entry& get(const std::string& key) {
        const auto it = sec_.entries.find(key);
        if (it == sec_.entries.end())
            throw ConfigError("[" + name_ + "] is missing required key '" + key + "'", sec_.line);
        it->second.used = true;
        return it->second;
    }

    double number(const std::string& key) {
        const Entry& e = get(key);
        expect(e, Value::Kind::Number, key);
        return e.value.number;
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::size_t count(const std::string& key) {
        const double v = number(key);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
            throw ConfigError("'" + key + "' must be a nonnegative integer", line_of(key));
        return static_cast<std::size_t>(v);
    }

    std::string string(const std::string& key) {
        const Entry& e = get(key);
        expect(e, Value::Kind::String, key);
        return e.value.string;
    }

    bool boolean_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const Entry& e = get(key);
        expect(e, Value::Kind::Bool, key);
        return e.value.boolean;
    }

    std::vector<double> numbers(const std::string& key) {
        const Entry& e = get(key);
        expect(e, Value::Kind::Array, key);
        std::vector<double> out;
        for (const auto& item : e.value.items) {
            if (item.kind != Value::Kind::Number)
                throw ConfigError("'" + key + "' must be an array of numbers", e.line);
            out.push_back(item.number);
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key) {
        const Entry& e = get(key);
        expect(e, Value::Kind::Array, key);
        std::vector<std::string> out;
        for (const auto& item : e.value.items) {
            if (item.kind != Value::Kind::String)
                throw ConfigError("'" + key + "' must be an array of strings", e.line);
            out.push_back(item.string);
        }
        return out;
    }

    void reject_unused() const {
        for (const auto& [key, e] : sec_.entries)
            if (!e.used) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", e.line);
    }

private:
    void expect(const Entry& e, Value::Kind kind, const std::string& key) const {
        if (e.value.kind != kind) {
            Value probe;
            probe.kind = kind;
            throw ConfigError("'" + key + "' must be a " + std::string(probe.kind_name()) + ", got a " +
                                  e.value.kind_name(),
                              e.line);
        }
    }

    Section& sec_;
    std::string name_;
};

// Re-raises library validation errors with the line of the offending section.
template <class Fn>
void at_line(int line, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const InputError& e) {
        throw ConfigError(e.what(), line);
    }
}

System read_system(Reader& r) {
    const std::string type = r.string("type");
    if (type == "R") {
        ReactionSystem sys;
        sys.alpha = r.numbers("alpha");
        sys.beta = r.numbers("beta");
        sys.d = r.numbers("d");
        sys.h = r.numbers("h");
        sys.m = r.numbers("m");
        sys.p = r.numbers("p");
        sys.k_f = r.number_or("k_f", 1.0);
        sys.k_b = r.number_or("k_b", 1.0);
        at_line(r.line(), [&] { sys.validate(); });
        return sys;
    }
    if (type == "general") {
        GeneralSystem sys;
        sys.species = r.count("species");
        sys.m = r.numbers("m");
        sys.d = r.numbers("d");
        sys.lambda = r.numbers("lambda");
        sys.nu = r.number("nu");
        const int f_line = r.has("f") ? r.line_of("f") : r.line();
        const auto texts = r.strings("f");
        if (texts.size() != sys.species)
            throw ConfigError("'f' needs one expression per species", f_line);
        std::vector<std::string> vars;
        for (std::size_t s = 0; s < sys.species; ++s) vars.push_back("u" + std::to_string(s + 1));
        std::vector<Expression> exprs;
        at_line(f_line, [&] {
            for (const auto& t : texts) exprs.emplace_back(t, vars);
        });
        sys.f = [exprs](std::span<const double> u, std::span<double> out) {
            for (std::size_t s = 0; s < exprs.size(); ++s) out[s] = exprs[s](u);
        };
        at_line(r.line(), [&] { sys.validate(); });
        return sys;
    }
    throw ConfigError("system type must be \"R\" or \"general\", got \"" + type + "\"", r.line_of("type"));
}

}  // namespace

std::vector<double> InitialProfile::sample(const Grid& grid) const {
    if (const auto* c = std::get_if<Constant>(&shape)) return std::vector<double>(grid.size(), c->value);
    if (const auto* s = std::get_if<Step>(&shape))
        return grid.sample([s](double x, double) { return x < s->split ? s->left : s->right; });
    const auto& e = std::get<Expression>(shape);
    if (e.arity() == 2) return grid.sample([&e](double x, double y) { return e(std::array{x, y}); });
    return grid.sample([&e](double x, double) { return e(std::array{x}); });
}

int ConfigFile::theory_dimension() const {
    if (dimension) return *dimension;
    if (grid) return grid->dim();
    throw ConfigError("no spatial dimension: set [system] dimension or give a [grid] section", 0);
}

FieldSet ConfigFile::initial_fields() const {
    if (!grid) throw ConfigError("missing [grid] section", 0);
    const auto names = species_names(system);
    FieldSet fields;
    for (std::size_t s = 0; s < names.size(); ++s) {
        if (s >= initial.size() || !initial[s])
            throw ConfigError("missing initial profile for species '" + names[s] + "' in [initial]", 0);
        fields.species.push_back(initial[s]->sample(*grid));
    }
    for (std::size_t s = 0; s < fields.num_species(); ++s)
        for (double v : fields[s])
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError("initial profile of '" + names[s] + "' is negative or not finite", 0);
    return fields;
}

SimConfig ConfigFile::sim_config() const {
    FieldSet init = initial_fields();
    SimConfig cfg{system, *grid, std::move(init)};
    cfg.t_end = t_end;
    cfg.cfl_safety = cfl_safety;
    cfg.sample_interval = sample_interval;
    cfg.epsilon = epsilon;
    cfg.scheme = scheme;
    cfg.p_norms = p_norms;
    cfg.store_snapshots = snapshots;
    return cfg;
}

ConfigFile parse_config(std::istream& in) {
    Document doc = read_document(in);
    if (!doc.sections.count("system")) throw ConfigError("missing [system] section", doc.last_line);

    ConfigFile cfg;
    Reader sys(doc.sections["system"], "system");
    cfg.system = read_system(sys);
    if (sys.has("dimension")) {
        const int line = sys.line_of("dimension");
        const std::size_t dim = sys.count("dimension");
        if (dim < 1) throw ConfigError("dimension must be >= 1", line);
        cfg.dimension = static_cast<int>(dim);
    }
    sys.reject_unused();

    if (doc.sections.count("grid")) {
        Reader g(doc.sections["grid"], "grid");
        const std::size_t dim = g.count("dim");
        const Entry& cells = g.get("cells");
        std::vector<std::size_t> n;
        if (cells.value.kind == Value::Kind::Number) {
            n.assign(dim, 0);
            for (auto& v : n) v = static_cast<std::size_t>(cells.value.number);
            if (cells.value.number != std::floor(cells.value.number))
                throw ConfigError("'cells' must be an integer", cells.line);
        } else {
            for (const auto& item : cells.value.items) {
                if (item.kind != Value::Kind::Number || item.number != std::floor(item.number) || item.number < 0)
                    throw ConfigError("'cells' must hold nonnegative integers", cells.line);
                n.push_back(static_cast<std::size_t>(item.number));
            }
        }
        if (n.size() != dim) throw ConfigError("'cells' must list one count per dimension", cells.line);
        at_line(g.line(), [&] {
            if (dim == 1) cfg.grid.emplace(n[0]);
            else if (dim == 2) cfg.grid.emplace(n[0], n[1]);
            else throw DomainError("grid dim must be 1 or 2");
        });
        g.reject_unused();
    }

    const auto names = species_names(cfg.system);
    cfg.initial.assign(names.size(), std::nullopt);
    if (doc.sections.count("initial")) {
        Reader ini(doc.sections["initial"], "initial");
        std::vector<std::string> vars{"x"};
        if (cfg.grid && cfg.grid->dim() == 2) vars.push_back("y");
        for (std::size_t s = 0; s < names.size(); ++s) {
            if (!ini.has(names[s])) continue;
            const Entry& e = ini.get(names[s]);
            const Value& v = e.value;
            if (v.kind == Value::Kind::Number) {
                if (!(v.number >= 0.0)) throw ConfigError("initial value of '" + names[s] + "' is negative", e.line);
                cfg.initial[s] = InitialProfile{InitialProfile::Constant{v.number}};
            } else if (v.kind == Value::Kind::String) {
                at_line(e.line, [&] { cfg.initial[s] = InitialProfile{Expression(v.string, vars)}; });
            } else if (v.kind == Value::Kind::Array) {
                if (v.items.size() != 3 || v.items[0].kind != Value::Kind::Number ||
                    v.items[1].kind != Value::Kind::Number || v.items[2].kind != Value::Kind::Number)
                    throw ConfigError("a step profile is [left, right, split]", e.line);
                const InitialProfile::Step st{v.items[0].number, v.items[1].number, v.items[2].number};
                if (!(st.left >= 0.0) || !(st.right >= 0.0))
                    throw ConfigError("step values of '" + names[s] + "' must be >= 0", e.line);
                cfg.initial[s] = InitialProfile{st};
            } else {
                throw ConfigError("initial profile must be a number, expression string or step array", e.line);
            }
        }
        ini.reject_unused();
    }

    if (doc.sections.count("run")) {
        Reader run(doc.sections["run"], "run");
        cfg.t_end = run.number_or("t_end", cfg.t_end);
        cfg.cfl_safety = run.number_or("cfl_safety", cfg.cfl_safety);
        cfg.sample_interval = run.number_or("sample_interval", cfg.sample_interval);
        cfg.epsilon = run.number_or("epsilon", cfg.epsilon);
        if (run.has("scheme")) {
            const int line = run.line_of("scheme");
            const std::string scheme = run.string("scheme");
            if (scheme == "explicit") cfg.scheme = Scheme::Explicit;
            else if (scheme == "semi-implicit") cfg.scheme = Scheme::SemiImplicit;
            else throw ConfigError("scheme must be \"explicit\" or \"semi-implicit\"", line);
        }
        if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be >= 0", run.line_of("t_end"));
        if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
            throw ConfigError("cfl_safety must lie in (0, 1]", run.line_of("cfl_safety"));
        if (!(cfg.sample_interval > 0.0))
            throw ConfigError("sample_interval must be > 0", run.line_of("sample_interval"));
        if (!(cfg.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0", run.line_of("epsilon"));
        run.reject_unused();
    }

    if (doc.sections.count("diagnostics")) {
        Reader dg(doc.sections["diagnostics"], "diagnostics");
        if (dg.has("p_norms")) {
            const int line = dg.line_of("p_norms");
            cfg.p_norms = dg.numbers("p_norms");
            if (cfg.p_norms.empty()) throw ConfigError("p_norms must not be empty", line);
            for (double p : cfg.p_norms)
                if (!(p >= 1.0)) throw ConfigError("p_norms entries must be >= 1", line);
        }
        cfg.snapshots = dg.boolean_or("snapshots", cfg.snapshots);
        if (dg.has("fit_from")) {
            const int line = dg.line_of("fit_from");
            cfg.fit_from = dg.number("fit_from");
            if (!(*cfg.fit_from >= 0.0)) throw ConfigError("fit_from must be >= 0", line);
        }
        dg.reject_unused();
    }
    return cfg;
}

ConfigFile parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
    return parse_config(in);
}

}  // namespace pmrd
