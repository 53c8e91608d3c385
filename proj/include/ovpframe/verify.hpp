#ifndef OVPFRAME_VERIFY_HPP_
#define OVPFRAME_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ovpframe/json_io.hpp"
#include "ovpframe/pspace.hpp"

namespace ovp {

struct VerifyConfig {
  std::uint64_t seed = 1;
  int instances = 100;
  std::vector<std::string> only;  // theorem ids; empty runs everything
  std::string inject_fault;       // run one counterfeit as a regular instance
  Index max_d = 6;
  Index max_e = 6;
  Index max_N = 12;
  Config cfg;
};

struct TheoremRecord {
  std::string id;
  std::string statement;
  int instances = 0;
  int failures = 0;
  double worst_residual = 0.0;
  double runtime = 0.0;  // seconds
  bool control_detected = false;
  std::string first_failure;
};

struct Report {
  std::vector<TheoremRecord> records;  // sorted by id
  int failures() const;
};

struct TheoremInfo {
  std::string id;
  std::string statement;
};
const std::vector<TheoremInfo> &theorem_catalog();

// Runs every selected theorem on cfg.instances random instances plus one
// counterfeit that must be rejected (an undetected counterfeit counts as a
// failure). Throws PreconditionFailed for unknown ids.
Report verify_all(const VerifyConfig &cfg);

// Runtime fields are included only when timing is set, so reports are
// byte-identical for a fixed seed.
json report_to_json(const Report &r, bool timing = false);

}  // namespace ovp

#endif  // OVPFRAME_VERIFY_HPP_
