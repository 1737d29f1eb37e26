#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmw {

/// One acceptance criterion: verdict, a one-line measurement summary, and
/// the wall time spent (each row also enforces its own time budget).
struct SuiteRow {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<SuiteRow> rows;
  bool all_pass() const;
};

/** Runs the acceptance rows (all of them when `only` is empty, else those
 *  whose name contains `only`; no match throws std::invalid_argument):
 *    lemma34_golden, example32_gap, thm31_contrast, example35_blowup,
 *    repairs, ip_weak_duality, stability_supergradient, pw_equals_db,
 *    lp_soundness, example33_nonattainment.
 *  `seed` drives every randomized battery; fixed-instance rows ignore it. */
SuiteReport run_suite(std::uint64_t seed, const std::string& only = "");

/// JSON rendering of a report, embedding the seed and the file-format
/// hashes of the named instance families the suite exercises.
std::string suite_report_json(const SuiteReport& rep);

}  // namespace cmw
