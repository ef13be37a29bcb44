#include "hqc/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "hqc/errors.hpp"

namespace hqc {

namespace {

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

// Reads one JSON object strictly: every key must be consumed.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json* child(const std::string& key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    double number(const std::string& key, double fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number");
        return v->get<double>();
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
        return v->get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
            throw ConfigError(join(path_, key), "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(join(path_, key), "expected a string");
        return v->get<std::string>();
    }

    const std::string& path() const { return path_; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw ConfigError(join(path_, key), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Fn>
auto translate(const std::string& field, Fn&& fn) {
    try {
        return fn();
    } catch (const InvalidParameter& e) {
        throw ConfigError(field, e.what());
    }
}

cplx parse_amplitude(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(path, "expected a number or [re, im]");
}

}  // namespace

HybridConfig config_from_json(const json& j) {
    HybridConfig c;
    ObjectReader root(j, "");
    std::vector<std::string> missing;

    c.mode = translate("mode", [&] { return mode_from_string(root.string("mode", "hybrid")); });
    c.seed = root.unsigned_integer("seed", 0);
    c.convention = translate("convention", [&] {
        return convention_from_string(root.string("convention", "chain_consistent"));
    });

    if (const json* q = root.child("quantum")) {
        ObjectReader r(*q, "quantum");
        c.quantum.dim = static_cast<int>(r.integer("dim", 64));
        c.quantum.m = r.number("mass", 1.0);
        c.quantum.omega = r.number("omega", 1.0);
        if (const json* packets = r.child("packets")) {
            if (!packets->is_array()) throw ConfigError("quantum.packets", "expected an array");
            c.packets.clear();
            for (std::size_t i = 0; i < packets->size(); ++i) {
                const std::string path = "quantum.packets[" + std::to_string(i) + "]";
                ObjectReader pr((*packets)[i], path);
                PacketSpec p;
                p.x = pr.number("x", 0.0);
                p.p = pr.number("p", 0.0);
                if (const json* a = pr.child("amplitude")) p.amplitude = parse_amplitude(*a, path + ".amplitude");
                pr.finish();
                c.packets.push_back(p);
            }
        }
        r.finish();
    }

    if (const json* cl = root.child("classical")) {
        ObjectReader r(*cl, "classical");
        c.classical.mass = r.number("mass", 1.0);
        c.classical.x0 = r.number("x0", 0.0);
        c.classical.p0 = r.number("p0", 0.0);
        c.classical.frozen = r.boolean("frozen", false);
        c.classical.blowup_bound = r.number("blowup_bound", kDefaultBlowupBound);
        if (const json* pot = r.child("potential")) {
            ObjectReader pr(*pot, "classical.potential");
            c.classical.potential.kind = translate("classical.potential.kind", [&] {
                return potential_kind_from_string(pr.string("kind", "free"));
            });
            c.classical.potential.stiffness = pr.number("stiffness", 0.0);
            if (const json* coeffs = pr.child("coefficients")) {
                if (!coeffs->is_array()) throw ConfigError("classical.potential.coefficients", "expected an array");
                for (const auto& v : *coeffs) {
                    if (!v.is_number()) throw ConfigError("classical.potential.coefficients", "expected numbers");
                    c.classical.potential.coefficients.push_back(v.get<double>());
                }
            }
            pr.finish();
        }
        r.finish();
    }

    if (const json* cp = root.child("coupling")) {
        ObjectReader r(*cp, "coupling");
        if (!r.has("lambda")) missing.emplace_back("coupling.lambda");
        if (!r.has("sigma")) missing.emplace_back("coupling.sigma");
        c.coupling.lambda = r.number("lambda", 0.0);
        c.coupling.sigma = r.number("sigma", 0.0);
        c.quantum.hbar = r.number("hbar", 1.0);
        r.finish();
    } else {
        missing = {"coupling.lambda", "coupling.sigma"};
    }

    if (const json* n = root.child("numerics")) {
        ObjectReader r(*n, "numerics");
        c.numerics.dt = r.number("dt", 1e-3);
        c.numerics.t_final = r.number("t_final", 1.0);
        c.numerics.output_stride = static_cast<int>(r.integer("output_stride", 1));
        c.numerics.scheme =
            translate("numerics.scheme", [&] { return scheme_from_string(r.string("scheme", "split_unitary")); });
        c.numerics.truncation_tol = r.number("truncation_tol", kTruncationTolerance);
        r.finish();
    }

    if (const json* a = root.child("analysis")) {
        ObjectReader r(*a, "analysis");
        c.analysis.classification_radius = r.optional_number("classification_radius");
        r.finish();
    }

    root.finish();

    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw ConfigError("", "missing required fields: " + list);
    }
    c.validate();
    return c;
}

json config_to_json(const HybridConfig& c) {
    json packets = json::array();
    for (const auto& p : c.packets)
        packets.push_back({{"x", p.x}, {"p", p.p}, {"amplitude", {p.amplitude.real(), p.amplitude.imag()}}});

    json potential = {{"kind", std::string(to_string(c.classical.potential.kind))}};
    if (c.classical.potential.kind == PotentialSpec::Kind::Harmonic)
        potential["stiffness"] = c.classical.potential.stiffness;
    if (c.classical.potential.kind == PotentialSpec::Kind::Polynomial)
        potential["coefficients"] = c.classical.potential.coefficients;

    json j = {
        {"mode", std::string(to_string(c.mode))},
        {"seed", c.seed},
        {"convention", std::string(to_string(c.convention))},
        {"quantum", {{"dim", c.quantum.dim}, {"mass", c.quantum.m}, {"omega", c.quantum.omega}, {"packets", packets}}},
        {"classical",
         {{"mass", c.classical.mass},
          {"x0", c.classical.x0},
          {"p0", c.classical.p0},
          {"frozen", c.classical.frozen},
          {"blowup_bound", c.classical.blowup_bound},
          {"potential", potential}}},
        {"coupling", {{"lambda", c.coupling.lambda}, {"sigma", c.coupling.sigma}, {"hbar", c.quantum.hbar}}},
        {"numerics",
         {{"dt", c.numerics.dt},
          {"t_final", c.numerics.t_final},
          {"output_stride", c.numerics.output_stride},
          {"scheme", std::string(to_string(c.numerics.scheme))},
          {"truncation_tol", c.numerics.truncation_tol}}},
    };
    if (c.analysis.classification_radius)
        j["analysis"] = {{"classification_radius", *c.analysis.classification_radius}};
    return j;
}

HybridConfig parse_config_text(std::string_view text) {
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string_view::npos;
    json j;
    if (blank) {
        j = json::object();
    } else {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("", std::string("malformed config: ") + e.what());
        }
    }
    return config_from_json(j);
}

HybridConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const HybridConfig& config) { return config_to_json(config).dump(2); }

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string config_hash(const HybridConfig& config) { return sha256_hex(config_to_json(config).dump()); }

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& r) {
    out << "# hqc trajectory, format 1\n";
    out << "# config_hash=" << r.config_hash << " seed=" << r.seed << " stream_index=" << r.stream_index
        << " mode=" << to_string(r.mode) << " convention=" << to_string(r.convention) << " steps=" << r.steps
        << "\n";
    out << "# columns: t time, X P classical position and momentum, x_expect p_expect <x> <p>, "
           "x_variance Var(x), x_bar measured record, prenorm norm before renormalization, dW noise increment\n";
    out << kCsvColumns << "\n";
    std::string line;
    for (const auto& row : r.rows) {
        line.clear();
        for (double v : {row.t, row.X, row.P, row.x_expect, row.p_expect, row.x_variance, row.x_bar, row.prenorm,
                         row.dW}) {
            if (!line.empty()) line.push_back(',');
            line += format_double(v);
        }
        line.push_back('\n');
        out << line;
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& record) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_trajectory_csv(out, record);
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    std::vector<TrajectoryRow> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        double v[9];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int k = 0; k < 9; ++k) {
            auto res = std::from_chars(p, end, v[k]);
            if (res.ec != std::errc()) throw Error("malformed CSV row: " + line);
            p = res.ptr + (res.ptr < end ? 1 : 0);
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
    }
    return rows;
}

json manifest_to_json(const RunManifest& m) {
    json outputs = json::array();
    for (const auto& f : m.outputs) outputs.push_back({{"path", f.path}, {"sha256", f.sha256}});
    return {{"artifact", "hqc"},
            {"version", m.version},
            {"command", m.command},
            {"options", m.options},
            {"config", config_to_json(m.config)},
            {"seeds", {{"master", m.master_seed}, {"trajectories", m.trajectories}}},
            {"outputs", outputs},
            {"wall_clock_seconds", m.wall_clock_seconds},
            {"steps", m.steps}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.options = j.value("options", json::object());
    m.config = config_from_json(j.at("config"));
    m.master_seed = j.at("seeds").at("master").get<std::uint64_t>();
    m.trajectories = j.at("seeds").at("trajectories").get<std::uint64_t>();
    m.version = j.value("version", std::string(kArtifactVersion));
    for (const auto& f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    m.steps = j.value("steps", std::uint64_t{0});
    return m;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void write_manifest(const std::filesystem::path& dir, RunManifest& m, const std::vector<std::string>& files) {
    m.outputs.clear();
    for (const auto& f : files) m.outputs.push_back({f, file_sha256(dir / f)});
    write_json(dir / "manifest.json", manifest_to_json(m));
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(std::string("malformed manifest: ") + e.what());
    }
    return manifest_from_json(j);
}

}  // namespace hqc
