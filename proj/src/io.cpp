#include "nsk/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nsk/errors.hpp"

namespace nsk {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
    throw ConfigError("config key '" + key + "': " + what + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto t = trim(v);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) bad_value(key, v, "expected a number");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    const auto t = trim(v);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) bad_value(key, v, "expected an integer");
    return out;
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
    const auto t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    bad_value(key, v, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) bad_value(key, v, "expected a comma-separated list");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.dim = to_int(k, v); }},
        {"n", [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_int(k, v); }},
        {"length", [](RunConfig& c, const std::string& k, const std::string& v) { c.length = to_double(k, v); }},
        {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.gamma = to_double(k, v); }},
        {"kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.kappa = to_double(k, v); }},
        {"epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.epsilon = to_double(k, v); }},
        {"epsilon_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.epsilon_list = to_list(k, v); }},
        {"nu_coeff", [](RunConfig& c, const std::string& k, const std::string& v) { c.nu_coeff = to_double(k, v); }},
        {"nu_power", [](RunConfig& c, const std::string& k, const std::string& v) { c.nu_power = to_double(k, v); }},
        {"dt", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); }},
        {"dt_factor", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt_factor = to_double(k, v); }},
        {"cfl", [](RunConfig& c, const std::string& k, const std::string& v) { c.cfl = to_double(k, v); }},
        {"t_end", [](RunConfig& c, const std::string& k, const std::string& v) { c.t_end = to_double(k, v); }},
        {"stride", [](RunConfig& c, const std::string& k, const std::string& v) { c.stride = to_int(k, v); }},
        {"s_profile", [](RunConfig& c, const std::string&, const std::string& v) { c.family.s_profile = trim(v); }},
        {"u_profile", [](RunConfig& c, const std::string&, const std::string& v) { c.family.u_profile = trim(v); }},
        {"width", [](RunConfig& c, const std::string& k, const std::string& v) { c.family.width = to_double(k, v); }},
        {"amplitude", [](RunConfig& c, const std::string& k, const std::string& v) { c.family.amplitude = to_double(k, v); }},
        {"u_amplitude", [](RunConfig& c, const std::string& k, const std::string& v) { c.family.u_amplitude = to_double(k, v); }},
        {"delta", [](RunConfig& c, const std::string& k, const std::string& v) { c.family.delta = to_double(k, v); }},
        {"perturbation", [](RunConfig& c, const std::string& k, const std::string& v) { c.family.perturbation = to_double(k, v); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             const long s = to_long(k, v);
             if (s < 0) bad_value(k, v, "expected a nonnegative integer");
             c.family.seed = static_cast<unsigned long>(s);
         }},
        {"random_modes", [](RunConfig& c, const std::string& k, const std::string& v) { c.family.random_modes = to_int(k, v); }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = trim(v); }},
        {"norm_p", [](RunConfig& c, const std::string& k, const std::string& v) { c.norm_p = to_double(k, v); }},
        {"norm_q", [](RunConfig& c, const std::string& k, const std::string& v) { c.norm_q = to_double(k, v); }},
        {"norm_s", [](RunConfig& c, const std::string& k, const std::string& v) { c.norm_s = to_double(k, v); }},
        {"window_fraction", [](RunConfig& c, const std::string& k, const std::string& v) { c.window_fraction = to_double(k, v); }},
        {"use_window", [](RunConfig& c, const std::string& k, const std::string& v) { c.use_window = to_bool(k, v); }},
        {"hs_index", [](RunConfig& c, const std::string& k, const std::string& v) { c.hs_index = to_double(k, v); }},
        {"decay_p", [](RunConfig& c, const std::string& k, const std::string& v) { c.decay_p = to_double(k, v); }},
        {"decay_q", [](RunConfig& c, const std::string& k, const std::string& v) { c.decay_q = to_double(k, v); }},
        {"theta", [](RunConfig& c, const std::string& k, const std::string& v) { c.theta = to_double(k, v); }},
        {"horizon", [](RunConfig& c, const std::string& k, const std::string& v) { c.horizon = to_double(k, v); }},
        {"time_samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.time_samples = to_int(k, v); }},
        {"euler_spacing", [](RunConfig& c, const std::string& k, const std::string& v) { c.euler_spacing = to_double(k, v); }},
        {"snapshot", [](RunConfig& c, const std::string&, const std::string& v) { c.snapshot = trim(v); }},
    };
    return table;
}

// Little-endian primitives.
template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& what) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw IoError("snapshot truncated while reading " + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

constexpr char kMagic[8] = {'N', 'S', 'K', 'S', 'N', 'A', 'P', '1'};

}  // namespace

void RunConfig::validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("config key 'dim': must be 2 or 3");
    if (n < 8 || (n & (n - 1)) != 0) throw ConfigError("config key 'n': must be a power of two >= 8");
    if (!(length > 0.0)) throw ConfigError("config key 'length': must be > 0");
    if (!(gamma > 1.0)) throw ConfigError("config key 'gamma': must be > 1");
    if (kappa < 0.0) throw ConfigError("config key 'kappa': must be >= 0");
    if (!(epsilon > 0.0)) throw ConfigError("config key 'epsilon': must be > 0");
    for (std::size_t i = 0; i < epsilon_list.size(); ++i) {
        if (!(epsilon_list[i] > 0.0)) throw ConfigError("config key 'epsilon_list': values must be > 0");
        if (i > 0 && !(epsilon_list[i] < epsilon_list[i - 1]))
            throw ConfigError("config key 'epsilon_list': must be strictly decreasing");
    }
    if (nu_coeff < 0.0) throw ConfigError("config key 'nu_coeff': must be >= 0");
    if (!(nu_power > 0.0)) throw ConfigError("config key 'nu_power': must be > 0");
    if (dt < 0.0) throw ConfigError("config key 'dt': must be >= 0");
    if (!(dt_factor > 0.0)) throw ConfigError("config key 'dt_factor': must be > 0");
    if (!(cfl > 0.0)) throw ConfigError("config key 'cfl': must be > 0");
    if (!(t_end > 0.0)) throw ConfigError("config key 't_end': must be > 0");
    if (stride < 1) throw ConfigError("config key 'stride': must be >= 1");
    if (norm_p < 1.0) throw ConfigError("config key 'norm_p': must be >= 1");
    if (norm_q < 1.0) throw ConfigError("config key 'norm_q': must be >= 1");
    if (!(window_fraction > 0.0 && window_fraction < 1.0)) throw ConfigError("config key 'window_fraction': must be in (0,1)");
    if (decay_p != 0.0 && decay_p < 2.0) throw ConfigError("config key 'decay_p': must be 0 or >= 2");
    if (decay_q != 0.0 && decay_q < 2.0) throw ConfigError("config key 'decay_q': must be 0 or >= 2");
    if (time_samples < 2) throw ConfigError("config key 'time_samples': must be >= 2");
    if (!(euler_spacing > 0.0)) throw ConfigError("config key 'euler_spacing': must be > 0");
    if (horizon < 0.0) throw ConfigError("config key 'horizon': must be >= 0");
    try {
        family.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

PhysParams RunConfig::params(double eps) const {
    PhysParams p;
    p.epsilon = eps;
    p.nu = nu_coeff * std::pow(eps, nu_power);
    p.kappa = kappa;
    p.gamma = gamma;
    return p;
}

SweepConfig RunConfig::sweep() const {
    SweepConfig s;
    s.dim = dim;
    s.n = n;
    s.length = length;
    s.gamma = gamma;
    s.kappa = kappa;
    s.epsilons = epsilon_list;
    s.nu_coeff = nu_coeff;
    s.nu_power = nu_power;
    s.t_end = t_end;
    s.dt_factor = dt_factor;
    s.checkpoint_stride = stride;
    s.euler_spacing = euler_spacing;
    s.window_fraction = window_fraction;
    s.hs_index = hs_index;
    s.family = family;
    s.limits.cfl = cfl;
    s.threads = threads_from_env();
    return s;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& t = setters();
    auto it = t.find(key);
    if (it == t.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, key, value);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    set_config_value(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.find('=') == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        apply_override(cfg, line);
    }
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

const ScalarField& SnapshotFile::field(const std::string& name) const {
    for (std::size_t i = 0; i < header.names.size(); ++i) {
        if (header.names[i] == name) return fields[i];
    }
    throw IoError("snapshot has no field '" + name + "'");
}

void write_snapshot(const std::filesystem::path& path, const SnapshotFile& snap) {
    const auto& h = snap.header;
    if (h.names.size() != snap.fields.size()) throw IoError("snapshot: names and fields differ in count");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write snapshot " + path.string());
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, h.version);
    put<std::uint32_t>(os, h.dim);
    put<std::uint32_t>(os, h.n);
    for (double v : {h.length, h.t, h.epsilon, h.nu, h.kappa, h.gamma}) put<double>(os, v);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(h.names.size()));
    for (const auto& name : h.names) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const auto& f : snap.fields) {
        if (f.grid().dim() != static_cast<int>(h.dim) || f.grid().n() != static_cast<int>(h.n))
            throw IoError("snapshot: field grid does not match the header");
        for (double v : f.values()) put<double>(os, v);
    }
    if (!os) throw IoError("write failed for " + path.string());
}

SnapshotFile read_snapshot(const std::filesystem::path& path, const SnapshotExpect& expect) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read snapshot " + path.string());
    char magic[8];
    if (!is.read(magic, sizeof(magic))) throw IoError("snapshot truncated while reading magic");
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw IoError("bad snapshot magic in " + path.string());
    SnapshotFile s;
    auto& h = s.header;
    h.version = get<std::uint32_t>(is, "version");
    if (h.version != 1) throw IoError("unsupported snapshot version " + std::to_string(h.version));
    h.dim = get<std::uint32_t>(is, "dimension");
    h.n = get<std::uint32_t>(is, "N");
    if (expect.dim && *expect.dim != h.dim)
        throw IoError("snapshot dimension mismatch: expected " + std::to_string(*expect.dim) + ", got " + std::to_string(h.dim));
    if (expect.n && *expect.n != h.n)
        throw IoError("snapshot N mismatch: expected " + std::to_string(*expect.n) + ", got " + std::to_string(h.n));
    h.length = get<double>(is, "L");
    h.t = get<double>(is, "t");
    h.epsilon = get<double>(is, "epsilon");
    h.nu = get<double>(is, "nu");
    h.kappa = get<double>(is, "kappa");
    h.gamma = get<double>(is, "gamma");
    const auto count = get<std::uint32_t>(is, "field count");
    if (count > 64) throw IoError("snapshot field count " + std::to_string(count) + " is implausible");
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = get<std::uint32_t>(is, "name length");
        if (len > 256) throw IoError("snapshot field name too long");
        std::string name(len, '\0');
        if (!is.read(name.data(), len)) throw IoError("snapshot truncated while reading field names");
        h.names.push_back(std::move(name));
    }
    GridPtr g;
    try {
        g = make_grid(static_cast<int>(h.dim), static_cast<int>(h.n), h.length);
    } catch (const ConfigError& e) {
        throw IoError(std::string("snapshot header describes an invalid grid: ") + e.what());
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        ScalarField f(g);
        for (auto& v : f.values()) v = get<double>(is, "field '" + h.names[i] + "'");
        s.fields.push_back(std::move(f));
    }
    if (is.peek() != std::char_traits<char>::eof()) throw IoError("snapshot has trailing bytes");
    return s;
}

namespace {
const char* kAxes[3] = {"x", "y", "z"};

SnapshotHeader header_for(const Grid& g, double t, const PhysParams& p) {
    SnapshotHeader h;
    h.dim = static_cast<std::uint32_t>(g.dim());
    h.n = static_cast<std::uint32_t>(g.n());
    h.length = g.length();
    h.t = t;
    h.epsilon = p.epsilon;
    h.nu = p.nu;
    h.kappa = p.kappa;
    h.gamma = p.gamma;
    return h;
}
}  // namespace

SnapshotFile to_snapshot(const FluidState& st) {
    SnapshotFile s;
    s.header = header_for(st.grid(), st.t, st.params);
    s.header.names.push_back("rho");
    s.fields.push_back(st.rho);
    for (int j = 0; j < st.m.dim(); ++j) {
        s.header.names.push_back(std::string("m_") + kAxes[j]);
        s.fields.push_back(st.m[j]);
    }
    return s;
}

FluidState fluid_from_snapshot(const SnapshotFile& snap) {
    const auto& h = snap.header;
    PhysParams p;
    p.epsilon = h.epsilon;
    p.nu = h.nu;
    p.kappa = h.kappa;
    p.gamma = h.gamma;
    const ScalarField& rho = snap.field("rho");
    VectorField m(rho.grid_ptr());
    for (int j = 0; j < static_cast<int>(h.dim); ++j) m[j] = snap.field(std::string("m_") + kAxes[j]);
    FluidState st(rho, m, p);
    st.t = h.t;
    return st;
}

SnapshotFile to_snapshot(const EulerState& st) {
    SnapshotFile s;
    PhysParams p;
    p.epsilon = 0.0;
    p.nu = 0.0;
    p.kappa = 0.0;
    p.gamma = 0.0;
    s.header = header_for(st.u.grid(), st.t, p);
    for (int j = 0; j < st.u.dim(); ++j) {
        s.header.names.push_back(std::string("u_") + kAxes[j]);
        s.fields.push_back(st.u[j]);
    }
    s.header.names.push_back("pi");
    s.fields.push_back(st.pi);
    return s;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

void write_sweep_csv(std::ostream& os, const SweepResult& res) {
    os << "epsilon,nu,sup_rel_energy,l2loc_vel_err,strichartz_q6,rho_h_s_err,rei_slack\n";
    for (const auto& r : res.rows) {
        if (!r.ok) continue;
        os << format_double(r.epsilon) << ',' << format_double(r.nu) << ',' << format_double(r.sup_rel_energy) << ','
           << format_double(r.l2loc_vel_err) << ',' << format_double(r.strichartz) << ',' << format_double(r.rho_hs)
           << ',' << format_double(r.rei_slack) << '\n';
    }
}

void write_lemma_csv(std::ostream& os, const SweepResult& res) {
    os << "epsilon,rho_l2,rho_l2_ratio,sqrt_l2,sqrt_l2_ratio,orlicz_ratio,grad_l2,sigma_l2";
    std::size_t nq = 0;
    for (const auto& r : res.rows) {
        if (r.ok) {
            nq = r.lemma.lq_ratios.size();
            for (const auto& [q, v] : r.lemma.lq_ratios) os << ",lq_ratio_" << format_double(q);
            break;
        }
    }
    os << '\n';
    for (const auto& r : res.rows) {
        if (!r.ok) continue;
        const auto& l = r.lemma;
        os << format_double(l.epsilon) << ',' << format_double(l.rho_l2) << ',' << format_double(l.rho_l2_ratio) << ','
           << format_double(l.sqrt_l2) << ',' << format_double(l.sqrt_l2_ratio) << ',' << format_double(l.orlicz_ratio)
           << ',' << format_double(l.grad_l2) << ',' << format_double(l.sigma_l2);
        for (std::size_t i = 0; i < nq; ++i) os << ',' << format_double(l.lq_ratios[i].second);
        os << '\n';
    }
}

void write_budget_csv(std::ostream& os, const SweepResult& res) {
    os << "epsilon,t,relative_energy,dissipation,lhs,I1,I2,I3,I4,I5,rhs,slack\n";
    for (const auto& r : res.rows) {
        for (const auto& b : r.checkpoints) {
            os << format_double(r.epsilon) << ',' << format_double(b.t) << ',' << format_double(b.relative_energy) << ','
               << format_double(b.dissipation) << ',' << format_double(b.lhs);
            for (double v : b.I) os << ',' << format_double(v);
            os << ',' << format_double(b.rhs) << ',' << format_double(b.slack()) << '\n';
        }
    }
}

void write_fits_json(std::ostream& os, const std::vector<MetricFit>& fits) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : fits) {
        nlohmann::ordered_json j;
        j["metric"] = f.metric;
        j["slope"] = f.fit.slope;
        j["residual"] = f.fit.residual;
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& [e, v] : f.points) pts.push_back({e, v});
        j["points"] = pts;
        arr.push_back(j);
    }
    os << arr.dump(2) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os << content;
    if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace nsk
