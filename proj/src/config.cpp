#include "wvlab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wvlab/errors.hpp"

namespace wvlab {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct Section {
    std::string name;
    int line = 0;
    std::map<std::string, Entry> keys;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<Section> tokenize(std::string_view text) {
    std::vector<Section> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", line_no);
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ParseError("empty section name", line_no);
            out.push_back({std::string(name), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
        if (out.empty()) throw ParseError("key outside of any section", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        if (value.empty()) throw ParseError("key '" + std::string(key) + "' has no value", line_no);
        auto [it, fresh] = out.back().keys.emplace(std::string(key), Entry{std::string(value), line_no});
        if (!fresh) throw ParseError("duplicate key '" + std::string(key) + "'", line_no);
    }
    return out;
}

double to_double(const Entry& e) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw ParseError("'" + e.value + "' is not a number", e.line);
    return v;
}

std::uint64_t to_uint(const Entry& e) {
    std::uint64_t v = 0;
    const char* last = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), last, v);
    if (ec != std::errc{} || ptr != last) throw ParseError("'" + e.value + "' is not a non-negative integer", e.line);
    return v;
}

bool to_bool(const Entry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ParseError("'" + e.value + "' is not true/false", e.line);
}

// "(re,im)" or a bare real number.
cplx to_cplx(const Entry& e) {
    if (e.value.front() != '(') return to_double(e);
    const auto comma = e.value.find(',');
    if (e.value.back() != ')' || comma == std::string::npos)
        throw ParseError("complex value must be written (re,im)", e.line);
    const Entry re{std::string(trim(std::string_view(e.value).substr(1, comma - 1))), e.line};
    const Entry im{std::string(trim(std::string_view(e.value).substr(comma + 1, e.value.size() - comma - 2))), e.line};
    if (re.value.empty() || im.value.empty()) throw ParseError("complex value must be written (re,im)", e.line);
    return {to_double(re), to_double(im)};
}

class Reader {
public:
    explicit Reader(Section& s) : s_(s) {}

    const Entry* find(const std::string& key) {
        auto it = s_.keys.find(key);
        if (it == s_.keys.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
    const Entry& require(const std::string& key) {
        if (const auto* e = find(key)) return *e;
        throw ParseError("missing key '" + key + "' in [" + s_.name + "]", s_.line);
    }
    bool has(const std::string& key) const { return s_.keys.contains(key); }

    double real(const std::string& key) { return to_double(require(key)); }
    double real(const std::string& key, double fallback) {
        const auto* e = find(key);
        return e ? to_double(*e) : fallback;
    }
    std::uint64_t count(const std::string& key) { return to_uint(require(key)); }
    std::string text(const std::string& key) { return require(key).value; }

    void finish() const {
        for (const auto& [key, e] : s_.keys)
            if (!e.used) throw ParseError("unknown key '" + key + "' in [" + s_.name + "]", e.line);
    }
    int line() const { return s_.line; }

private:
    Section& s_;
};

// Re-validate with module invariants, reporting against the section line.
template <class F>
void checked(int line, F&& f) {
    try {
        f();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), line);
    }
}

std::string format_cplx(cplx z) { return "(" + format_double(z.real()) + "," + format_double(z.imag()) + ")"; }

const std::array<std::string_view, 4> kTargets{"g", "h", "f+", "f-"};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> lattice(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::vector<double> TraceRun::times() const { return lattice(t_min, t_max, nt); }
std::vector<double> TraceRun::positions() const { return lattice(x_min, x_max, nx); }

void PointerRun::validate() const {
    pointer.validate();
    if (samples == 0) throw InvalidArgument("pointer samples must be at least 1");
    if (selection.has_value() == !target.empty())
        throw InvalidArgument("pointer needs either a target region or explicit amplitudes a, b, c, d_post");
    if (selection) selection->validate();
    if (!target.empty() && std::ranges::find(kTargets, target) == kTargets.end())
        throw InvalidArgument("pointer target must be one of g, h, f+, f-");
}

void TraceRun::validate() const {
    if (nt == 0 || nx == 0) throw InvalidArgument("trace lattice needs nt, nx >= 1");
    if (!(t_min <= t_max) || !(x_min <= x_max)) throw InvalidArgument("trace lattice bounds are reversed");
    if (detector.empty()) throw InvalidArgument("trace detector id is empty");
}

void RunConfig::validate() const {
    recipe.validate();
    consts.validate();
    if (grid) grid->validate();
    if (pointer) pointer->validate();
    if (trace) trace->validate();
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    auto sections = tokenize(text);
    RunConfig c;
    std::map<std::string, int> seen;
    for (auto& sec : sections) {
        if (!seen.emplace(sec.name, sec.line).second) throw ParseError("duplicate section [" + sec.name + "]", sec.line);
        Reader r(sec);
        if (sec.name == "recipe") {
            c.recipe = {r.real("k0"), r.real("k1"), r.real("dk_f"), r.real("dk_g"), r.real("x0")};
            checked(r.line(), [&] { c.recipe.validate(); });
        } else if (sec.name == "constants") {
            c.consts = {r.real("hbar"), r.real("mass")};
            checked(r.line(), [&] { c.consts.validate(); });
        } else if (sec.name == "grid") {
            c.grid = GridSpec{r.real("x_min"), r.real("x_max"), r.count("n")};
            checked(r.line(), [&] { c.grid->validate(); });
        } else if (sec.name == "scenario") {
            std::filesystem::path p = r.text("file");
            if (p.is_relative() && !base_dir.empty()) p = (base_dir / p).lexically_normal();
            c.scenario_file = p.string();
        } else if (sec.name == "run") {
            if (const auto* e = r.find("seed")) c.seed = to_uint(*e);
            if (const auto* e = r.find("labeled")) c.labeled = to_bool(*e);
            if (const auto* e = r.find("out")) c.out_dir = e->value;
        } else if (sec.name == "pointer") {
            PointerRun p;
            p.pointer = {r.real("width"), r.real("deflection")};
            p.samples = r.count("samples");
            if (const auto* e = r.find("target")) p.target = e->value;
            if (r.has("a") || r.has("b") || r.has("c") || r.has("d_post"))
                p.selection = ProbeSelection{to_cplx(r.require("a")), to_cplx(r.require("b")),
                                             to_cplx(r.require("c")), to_cplx(r.require("d_post"))};
            c.pointer = p;
        } else if (sec.name == "trace") {
            TraceRun t;
            t.t_min = r.real("t_min");
            t.t_max = r.real("t_max");
            t.nt = r.count("nt");
            t.x_min = r.real("x_min");
            t.x_max = r.real("x_max");
            t.nx = r.count("nx");
            if (const auto* e = r.find("detector")) t.detector = e->value;
            c.trace = t;
        } else {
            throw ParseError("unknown section [" + sec.name + "]", sec.line);
        }
        r.finish();
        if (sec.name == "pointer") checked(sec.line, [&] { c.pointer->validate(); });
        if (sec.name == "trace") checked(sec.line, [&] { c.trace->validate(); });
    }
    for (const char* required : {"recipe", "constants"})
        if (!seen.contains(required)) throw ParseError(std::string("missing section [") + required + "]");
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_file(path), path.parent_path());
}

std::string to_config_text(const RunConfig& c) {
    std::ostringstream o;
    const auto kv = [&](std::string_view k, const std::string& v) { o << k << " = " << v << '\n'; };
    o << "[recipe]\n";
    kv("k0", format_double(c.recipe.k0));
    kv("k1", format_double(c.recipe.k1));
    kv("dk_f", format_double(c.recipe.dk_f));
    kv("dk_g", format_double(c.recipe.dk_g));
    kv("x0", format_double(c.recipe.x0));
    o << "\n[constants]\n";
    kv("hbar", format_double(c.consts.hbar));
    kv("mass", format_double(c.consts.mass));
    if (c.grid) {
        o << "\n[grid]\n";
        kv("x_min", format_double(c.grid->x_min));
        kv("x_max", format_double(c.grid->x_max));
        kv("n", std::to_string(c.grid->n));
    }
    if (!c.scenario_file.empty()) {
        o << "\n[scenario]\n";
        kv("file", c.scenario_file);
    }
    o << "\n[run]\n";
    kv("seed", std::to_string(c.seed));
    kv("labeled", c.labeled ? "true" : "false");
    if (!c.out_dir.empty()) kv("out", c.out_dir);
    if (c.pointer) {
        const auto& p = *c.pointer;
        o << "\n[pointer]\n";
        kv("width", format_double(p.pointer.width));
        kv("deflection", format_double(p.pointer.deflection));
        kv("samples", std::to_string(p.samples));
        if (!p.target.empty()) kv("target", p.target);
        if (p.selection) {
            kv("a", format_cplx(p.selection->a));
            kv("b", format_cplx(p.selection->b));
            kv("c", format_cplx(p.selection->c));
            kv("d_post", format_cplx(p.selection->d_post));
        }
    }
    if (c.trace) {
        const auto& t = *c.trace;
        o << "\n[trace]\n";
        kv("t_min", format_double(t.t_min));
        kv("t_max", format_double(t.t_max));
        kv("nt", std::to_string(t.nt));
        kv("x_min", format_double(t.x_min));
        kv("x_max", format_double(t.x_max));
        kv("nx", std::to_string(t.nx));
        kv("detector", t.detector);
    }
    return o.str();
}

ScenarioFile parse_scenario(std::string_view text, const PacketRecipe& recipe, const PhysicalConstants& consts) {
    auto sections = tokenize(text);
    ScenarioFile f;
    auto& s = f.scenario;
    s.consts = consts;
    s.recipe = recipe;
    bool header = false;
    for (auto& sec : sections) {
        Reader r(sec);
        if (sec.name == "scenario") {
            if (header) throw ParseError("duplicate section [scenario]", sec.line);
            header = true;
            s.t_start = r.real("t_start");
            s.t_end = r.real("t_end");
            s.geometry = {r.real("focus_time"), r.real("x_g"), r.real("x_h")};
            s.branch_amplitude_floor = r.real("branch_amplitude_floor", s.branch_amplitude_floor);
            if (const auto* e = r.find("max_events")) s.max_events = to_uint(*e);
            if (const auto* e = r.find("tune")) f.tune = to_bool(*e);
        } else if (sec.name == "element") {
            Element e;
            e.id = r.text("id");
            checked(sec.line, [&] { e.kind = parse_element_kind(r.text("kind")); });
            e.x_ref = r.real("x");
            e.t_ref = r.real("t");
            e.velocity = r.real("velocity");
            e.t_on = r.real("t_on", e.t_on);
            e.t_off = r.real("t_off", e.t_off);
            if (e.kind == ElementKind::beam_splitter) {
                e.splitter.reflectivity = r.real("reflectivity");
                e.splitter.alpha = r.real("alpha", e.splitter.alpha);
                e.splitter.beta = r.real("beta", e.splitter.beta);
                e.splitter.delta = r.real("delta", e.splitter.delta);
                if (const auto* p = r.find("interference_phase")) e.splitter.interference_phase = to_double(*p);
            }
            checked(sec.line, [&] { e.validate(); });
            s.elements.push_back(std::move(e));
        } else {
            throw ParseError("unknown section [" + sec.name + "]", sec.line);
        }
        r.finish();
    }
    if (!header) throw ParseError("missing section [scenario]");
    // Region separation follows the layout; coincident regions keep the configured x0.
    if (const double sep = std::abs(s.geometry.x_h - s.geometry.x_g); sep > 0.0) s.recipe.x0 = sep;
    checked(0, [&] { s.validate(); });
    return f;
}

ScenarioFile load_scenario(const std::filesystem::path& path, const PacketRecipe& recipe,
                           const PhysicalConstants& consts) {
    try {
        return parse_scenario(read_file(path), recipe, consts);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string to_scenario_text(const ScenarioFile& f) {
    const auto& s = f.scenario;
    std::ostringstream o;
    const auto kv = [&](std::string_view k, const std::string& v) { o << k << " = " << v << '\n'; };
    o << "[scenario]\n";
    kv("t_start", format_double(s.t_start));
    kv("t_end", format_double(s.t_end));
    kv("focus_time", format_double(s.geometry.focus_time));
    kv("x_g", format_double(s.geometry.x_g));
    kv("x_h", format_double(s.geometry.x_h));
    kv("branch_amplitude_floor", format_double(s.branch_amplitude_floor));
    kv("max_events", std::to_string(s.max_events));
    kv("tune", f.tune ? "true" : "false");
    for (const auto& e : s.elements) {
        o << "\n[element]\n";
        kv("id", e.id);
        kv("kind", std::string(element_kind_name(e.kind)));
        kv("x", format_double(e.x_ref));
        kv("t", format_double(e.t_ref));
        kv("velocity", format_double(e.velocity));
        if (std::isfinite(e.t_on)) kv("t_on", format_double(e.t_on));
        if (std::isfinite(e.t_off)) kv("t_off", format_double(e.t_off));
        if (e.kind == ElementKind::beam_splitter) {
            kv("reflectivity", format_double(e.splitter.reflectivity));
            kv("alpha", format_double(e.splitter.alpha));
            kv("beta", format_double(e.splitter.beta));
            kv("delta", format_double(e.splitter.delta));
            if (e.splitter.interference_phase) kv("interference_phase", format_double(*e.splitter.interference_phase));
        }
    }
    return o.str();
}

}  // namespace wvlab
