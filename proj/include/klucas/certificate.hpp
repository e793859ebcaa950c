#pragma once

// Machine-readable bound records. Values are upper bounds printed with 12
// significant digits rounded up; each record also carries the published
// value and a comparison verdict.

#include <gmpxx.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "klucas/error.hpp"
#include "klucas/mp.hpp"

namespace klucas {

enum class Verdict { kNone, kSharper, kEqual, kLooser, kMismatch };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kSharper:
      return "sharper";
    case Verdict::kEqual:
      return "equal";
    case Verdict::kLooser:
      return "looser";
    case Verdict::kMismatch:
      return "mismatch";
    case Verdict::kNone:
      break;
  }
  return "none";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "sharper") return Verdict::kSharper;
  if (s == "equal") return Verdict::kEqual;
  if (s == "looser") return Verdict::kLooser;
  if (s == "mismatch") return Verdict::kMismatch;
  if (s == "none") return Verdict::kNone;
  throw UsageError("unknown verdict '" + s + "'");
}

/// An auxiliary inequality the derivation leans on, with its checked range.
struct Guard {
  std::string statement;
  bool holds = false;
};

struct BoundCertificate {
  std::string name;
  std::string statement;                      // the inequality, human readable
  std::map<std::string, std::string> inputs;  // parameter -> decimal string
  std::string value;                          // upper bound, 12 digits rounded up
  std::string paper_value;                    // empty when nothing is published
  Verdict verdict = Verdict::kNone;
  std::vector<std::string> chain;  // names of certificates this one uses
  std::vector<Guard> guards;
  std::vector<std::string> notes;

  bool guards_hold() const {
    for (const auto& g : guards) {
      if (!g.holds) return false;
    }
    return true;
  }
};

/// sharper when our upper bound is below the published one, equal when it
/// matches exactly, looser otherwise.
inline Verdict compare_to_paper(const Interval& ours, const std::string& paper) {
  if (paper.empty()) return Verdict::kNone;
  Interval p = Interval::from_decimal(paper, ours.prec());
  if (certainly_less(ours, p)) return Verdict::kSharper;
  if (mpfr_equal_p(ours.upper().get(), p.upper().get()) && mpfr_equal_p(p.lower().get(), p.upper().get())) {
    return Verdict::kEqual;
  }
  return Verdict::kLooser;
}

inline BoundCertificate make_certificate(std::string name, std::string statement, const Interval& value,
                                         std::string paper_value, std::vector<std::string> chain = {}) {
  if (!value.is_positive()) throw ConsistencyError(name + ": bound is not positive");
  BoundCertificate c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  c.value = value.upper_str(12);
  c.paper_value = std::move(paper_value);
  c.verdict = compare_to_paper(value, c.paper_value);
  c.chain = std::move(chain);
  return c;
}

/// Names unique and every chain entry refers to an earlier certificate, which
/// makes the dependency graph acyclic.
inline void check_chain(const std::vector<BoundCertificate>& certs) {
  std::set<std::string> seen;
  for (const auto& c : certs) {
    for (const auto& dep : c.chain) {
      if (!seen.count(dep)) throw ConsistencyError(c.name + " depends on unknown or later '" + dep + "'");
    }
    if (!seen.insert(c.name).second) throw ConsistencyError("duplicate certificate '" + c.name + "'");
  }
}

inline nlohmann::json to_json(const BoundCertificate& c) {
  nlohmann::json guards = nlohmann::json::array();
  for (const auto& g : c.guards) guards.push_back({{"statement", g.statement}, {"holds", g.holds}});
  return {{"name", c.name},       {"statement", c.statement},      {"inputs", c.inputs},
          {"value", c.value},     {"paper_value", c.paper_value},  {"verdict", to_string(c.verdict)},
          {"chain", c.chain},     {"guards", guards},              {"notes", c.notes}};
}

inline BoundCertificate certificate_from_json(const nlohmann::json& j) {
  BoundCertificate c;
  c.name = j.at("name").get<std::string>();
  c.statement = j.at("statement").get<std::string>();
  c.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  c.value = j.at("value").get<std::string>();
  c.paper_value = j.at("paper_value").get<std::string>();
  c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  c.chain = j.at("chain").get<std::vector<std::string>>();
  for (const auto& g : j.at("guards")) c.guards.push_back({g.at("statement").get<std::string>(), g.at("holds").get<bool>()});
  c.notes = j.at("notes").get<std::vector<std::string>>();
  return c;
}

}  // namespace klucas
