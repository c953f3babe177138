#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace parisian {

// Identity of a simulated constant: which family, and its parameters.
struct ConstantDescriptor {
    enum class Kind { Piterbarg, Pickands } kind = Kind::Piterbarg;
    double hurst = 0.5;   // Pickands family only; the Piterbarg family is Brownian (0.5)
    double window = 0;    // window length L
    double a = 0, b = 0;  // Piterbarg drift slopes; ignored for Pickands
    void validate() const;
};

// Simulation settings that, together with the descriptor, key a stored value.
struct RecordConfig {
    double M = 0;
    double tau = 0.005;
    double eta = 0;  // NAN = not applicable (Piterbarg family)
    std::size_t n = 10000;
    std::uint64_t seed = 0;
};

struct ConstantRecord {
    ConstantDescriptor desc;
    RecordConfig cfg;
    double value = 0, std_error = 0;
    std::string created_at;  // ISO-8601 UTC; put() fills it when empty
    std::string version;     // tool version; put() fills it when empty
};

// 16-hex-digit content key over descriptor + config (FNV-1a of the canonical
// serialization, shortest round-trip decimals).
std::string registry_key(const ConstantDescriptor& d, const RecordConfig& c);

// One space-separated line:
//   key kind H window a b value std_error M tau eta n seed created_at version
// with "-" for fields that do not apply (drift slopes of the Pickands family,
// eta of the Piterbarg family).
std::string serialize_record(const ConstantRecord& rec);
std::optional<ConstantRecord> parse_record(const std::string& line);

enum class ResolvePolicy { UseOrSimulate, CacheOnly };

// Append-only line store of simulated constants.  Appends take an advisory
// exclusive file lock; readers re-scan the file on every lookup, so values
// appended by other processes become visible immediately.  Malformed lines are
// skipped and reported through warnings().
class Registry {
  public:
    explicit Registry(std::string path);
    const std::string& path() const { return path_; }

    void put(ConstantRecord rec);
    std::optional<ConstantRecord> get(const ConstantDescriptor& d, const RecordConfig& c) const;

    // CacheOnly: throw MissingConstant on a miss.  UseOrSimulate: call
    // simulate(), store the result, return it.
    ConstantRecord resolve(const ConstantDescriptor& d, const RecordConfig& c,
                           ResolvePolicy policy,
                           const std::function<ConstantRecord()>& simulate);

    std::vector<ConstantRecord> all() const;
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    std::string path_;
    mutable std::vector<std::string> warnings_;
};

}  // namespace parisian
