#include "parisian/registry.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "parisian/errors.hpp"
#include "parisian/version.hpp"

namespace parisian {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_or_dash(double v) { return std::isnan(v) ? "-" : fmt_double(v); }

bool parse_double(const std::string& tok, double* out) {
    if (tok == "-") {
        *out = std::nan("");
        return true;
    }
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, *out);
    return res.ec == std::errc() && res.ptr == e;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string kind_name(ConstantDescriptor::Kind k) {
    return k == ConstantDescriptor::Kind::Piterbarg ? "piterbarg" : "pickands";
}

std::string canonical(const ConstantDescriptor& d, const RecordConfig& c) {
    std::string s = kind_name(d.kind);
    s += '|';
    s += fmt_double(d.hurst);
    s += '|';
    s += fmt_double(d.window);
    s += '|';
    if (d.kind == ConstantDescriptor::Kind::Piterbarg) {
        s += fmt_double(d.a);
        s += '|';
        s += fmt_double(d.b);
    } else {
        s += "-|-";
    }
    s += '|';
    s += fmt_double(c.M);
    s += '|';
    s += fmt_double(c.tau);
    s += '|';
    s += fmt_or_dash(c.eta);
    s += '|';
    s += std::to_string(c.n);
    s += '|';
    s += std::to_string(c.seed);
    return s;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void ConstantDescriptor::validate() const {
    if (!(window >= 0) || !std::isfinite(window))
        throw std::invalid_argument("ConstantDescriptor: window must be finite and >= 0");
    if (kind == Kind::Piterbarg) {
        if (!(a > 0) || !(b > 0))
            throw std::invalid_argument("ConstantDescriptor: drift slopes must be positive");
    } else {
        if (!(hurst > 0) || !(hurst < 1))
            throw std::invalid_argument("ConstantDescriptor: hurst must lie in (0,1)");
    }
}

std::string registry_key(const ConstantDescriptor& d, const RecordConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical(d, c))));
    return buf;
}

std::string serialize_record(const ConstantRecord& rec) {
    const ConstantDescriptor& d = rec.desc;
    const RecordConfig& c = rec.cfg;
    std::string s = registry_key(d, c);
    s += ' ';
    s += kind_name(d.kind);
    s += ' ';
    s += fmt_double(d.hurst);
    s += ' ';
    s += fmt_double(d.window);
    s += ' ';
    if (d.kind == ConstantDescriptor::Kind::Piterbarg) {
        s += fmt_double(d.a);
        s += ' ';
        s += fmt_double(d.b);
    } else {
        s += "- -";
    }
    s += ' ';
    s += fmt_double(rec.value);
    s += ' ';
    s += fmt_double(rec.std_error);
    s += ' ';
    s += fmt_double(c.M);
    s += ' ';
    s += fmt_double(c.tau);
    s += ' ';
    s += fmt_or_dash(c.eta);
    s += ' ';
    s += std::to_string(c.n);
    s += ' ';
    s += std::to_string(c.seed);
    s += ' ';
    s += rec.created_at.empty() ? "-" : rec.created_at;
    s += ' ';
    s += rec.version.empty() ? "-" : rec.version;
    return s;
}

std::optional<ConstantRecord> parse_record(const std::string& line) {
    std::istringstream in(line);
    std::string key, kind, h, window, a, b, value, se, m, tau, eta, n, seed, created, version;
    if (!(in >> key >> kind >> h >> window >> a >> b >> value >> se >> m >> tau >> eta >> n >>
          seed >> created >> version))
        return std::nullopt;
    std::string extra;
    if (in >> extra) return std::nullopt;

    ConstantRecord rec;
    if (kind == "piterbarg")
        rec.desc.kind = ConstantDescriptor::Kind::Piterbarg;
    else if (kind == "pickands")
        rec.desc.kind = ConstantDescriptor::Kind::Pickands;
    else
        return std::nullopt;
    if (!parse_double(h, &rec.desc.hurst) || !parse_double(window, &rec.desc.window) ||
        !parse_double(a, &rec.desc.a) || !parse_double(b, &rec.desc.b) ||
        !parse_double(value, &rec.value) || !parse_double(se, &rec.std_error) ||
        !parse_double(m, &rec.cfg.M) || !parse_double(tau, &rec.cfg.tau) ||
        !parse_double(eta, &rec.cfg.eta))
        return std::nullopt;
    {
        std::size_t n_int = 0;
        auto ri = std::from_chars(n.data(), n.data() + n.size(), n_int);
        if (ri.ec != std::errc() || ri.ptr != n.data() + n.size()) return std::nullopt;
        rec.cfg.n = n_int;
    }
    {
        std::uint64_t s_int = 0;
        auto ri = std::from_chars(seed.data(), seed.data() + seed.size(), s_int);
        if (ri.ec != std::errc() || ri.ptr != seed.data() + seed.size()) return std::nullopt;
        rec.cfg.seed = s_int;
    }
    rec.created_at = created == "-" ? "" : created;
    rec.version = version == "-" ? "" : version;
    // The stored key must match the recomputed one, otherwise the line was
    // hand-edited inconsistently.
    if (key != registry_key(rec.desc, rec.cfg)) return std::nullopt;
    return rec;
}

Registry::Registry(std::string path) : path_(std::move(path)) {
    if (path_.empty()) throw std::invalid_argument("Registry: empty path");
}

void Registry::put(ConstantRecord rec) {
    rec.desc.validate();
    if (rec.created_at.empty()) rec.created_at = utc_now();
    if (rec.version.empty()) rec.version = kVersion;
    const std::string line = serialize_record(rec) + "\n";
    const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw StoreCorrupt("Registry: cannot open " + path_ + " for append");
    ::flock(fd, LOCK_EX);
    const ssize_t written = ::write(fd, line.data(), line.size());
    ::flock(fd, LOCK_UN);
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size()))
        throw StoreCorrupt("Registry: short write to " + path_);
}

std::vector<ConstantRecord> Registry::all() const {
    warnings_.clear();
    std::vector<ConstantRecord> out;
    std::ifstream in(path_);
    if (!in) return out;  // absent store = empty store
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto rec = parse_record(line);
        if (rec)
            out.push_back(std::move(*rec));
        else
            warnings_.push_back(path_ + ":" + std::to_string(lineno) + ": skipping malformed line");
    }
    return out;
}

std::optional<ConstantRecord> Registry::get(const ConstantDescriptor& d,
                                            const RecordConfig& c) const {
    const std::string key = registry_key(d, c);
    std::optional<ConstantRecord> found;
    for (auto& rec : all())
        if (registry_key(rec.desc, rec.cfg) == key) found = rec;  // last one wins
    return found;
}

ConstantRecord Registry::resolve(const ConstantDescriptor& d, const RecordConfig& c,
                                 ResolvePolicy policy,
                                 const std::function<ConstantRecord()>& simulate) {
    if (auto hit = get(d, c)) return *hit;
    if (policy == ResolvePolicy::CacheOnly)
        throw MissingConstant("Registry: no cached value for key " + registry_key(d, c));
    ConstantRecord rec = simulate();
    rec.desc = d;
    rec.cfg = c;
    put(rec);
    return rec;
}

}  // namespace parisian
