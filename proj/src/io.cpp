#include "bwalk/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bwalk {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json diagram_to_json(const YoungDiagram& d) { return Json{{"rows", d.rows}}; }

YoungDiagram diagram_from_json(const Json& j) {
    return YoungDiagram(j.at("rows").get<std::vector<long>>());
}

Json config_to_json(const ParticleConfig& c) {
    Json j;
    if (c.theta.is_rational)
        j["theta"] = std::to_string(c.theta.num) + "/" + std::to_string(c.theta.den);
    else
        j["theta"] = c.theta.value;
    j["positions"] = c.positions;
    return j;
}

ParticleConfig config_from_json(const Json& j) {
    Theta th;
    const auto& t = j.at("theta");
    if (t.is_string())
        th = Theta::parse(t.get<std::string>());
    else
        th = Theta::from_double(t.get<double>());
    return ParticleConfig::from_positions(th, j.at("positions").get<std::vector<double>>());
}

void write_height_field_csv(const HeightField& f, const std::string& path,
                            const std::vector<std::string>& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (const auto& m : metadata) out << "# " << m << "\n";
    out << "x,t,H\n";
    for (long j = 0; j < f.nt; ++j)
        for (long i = 0; i < f.nx; ++i)
            out << format_g17(f.x_of(i)) << "," << format_g17(f.t_of(j)) << ","
                << format_g17(f.at(i, j)) << "\n";
}

HeightField read_height_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<double> xs, ts, hs;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
        std::istringstream ss(line);
        double x, t, h;
        char c;
        ss >> x >> c >> t >> c >> h;
        xs.push_back(x);
        ts.push_back(t);
        hs.push_back(h);
    }
    if (xs.empty()) throw std::runtime_error("empty height field " + path);
    HeightField f;
    long nx = 1;
    while (nx < (long)xs.size() && xs[nx] > xs[nx - 1]) ++nx;
    f.nx = nx;
    f.nt = (long)xs.size() / nx;
    f.x_min = xs[0];
    f.dx = nx > 1 ? xs[1] - xs[0] : 1;
    f.dt = f.nt > 1 ? ts[nx] - ts[0] : 1;
    f.t_horizon = ts.back();
    f.H = hs;
    return f;
}

void write_ensemble_jsonl(const WalkEnsemble& w, const std::string& path,
                          const std::vector<std::string>& metadata) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (const auto& m : metadata) out << "# " << m << "\n";
    for (long t = 0; t <= w.horizon(); ++t) {
        Json j;
        j["t"] = t;
        j["positions"] = w.positions(t);
        out << j.dump() << "\n";
    }
}

BoundaryProfile read_boundary_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::vector<double> xs, hs;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
        std::istringstream ss(line);
        double x, h;
        char c;
        ss >> x >> c >> h;
        xs.push_back(x);
        hs.push_back(h);
    }
    if (xs.size() < 2) throw std::runtime_error("profile needs at least two nodes: " + path);
    BoundaryProfile p;
    p.x0 = xs[0];
    p.dx = xs[1] - xs[0];
    p.h = hs;
    return p;
}

void write_boundary_profile_csv(const BoundaryProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "x,h\n";
    for (size_t i = 0; i < p.h.size(); ++i)
        out << format_g17(p.x0 + i * p.dx) << "," << format_g17(p.h[i]) << "\n";
}

RunConfig RunConfig::from_file(const std::string& path,
                               const std::vector<std::string>& allowed_fields) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    RunConfig cfg;
    in >> cfg.data;
    if (!cfg.data.contains("version"))
        throw std::runtime_error("config " + path + " is missing the required 'version' field");
    for (auto it = cfg.data.begin(); it != cfg.data.end(); ++it) {
        if (it.key() == "version") continue;
        bool ok = false;
        for (const auto& f : allowed_fields)
            if (f == it.key()) { ok = true; break; }
        if (!ok) throw std::runtime_error("config " + path + ": unknown field '" + it.key() + "'");
    }
    return cfg;
}

uint64_t RunConfig::hash() const {
    std::string s = data.dump();
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string RunConfig::metadata_line(uint64_t seed) const {
    std::ostringstream ss;
    ss << "config_hash=" << std::hex << hash() << std::dec << " seed=" << seed
       << " rng=splitmix64-counter version=" << data.value("version", std::string("1"));
    return ss.str();
}

}  // namespace bwalk
