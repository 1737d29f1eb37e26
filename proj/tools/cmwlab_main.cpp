// cmwlab: command-line front end for the conditional-moment transport lab.
//
//   solve <file.json>      solve one transport instance, print certificate
//   refine <kind> [sizes]  size-indexed study (example32, example32-mod, lemma31)
//   pwdb <file.json>       robust program: primal-worst vs dual-best report
//   suite                  full acceptance matrix (exit 1 on any failing row)
//   gen <kind>             write an instance file for a named family
//
// Flags: --csv PATH, --json PATH, --tol X, --seed N, --only NAME.
// Exit codes: 0 pass, 1 failed check, 2 input error, 3 solver error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cmw/cmw.hpp"
#include "cmw/instances.hpp"
#include "cmw/robust.hpp"
#include "cmw/suite.hpp"

namespace {

using namespace cmw;

constexpr int kExitPass = 0, kExitCheckFail = 1, kExitInput = 2,
              kExitSolver = 3;
constexpr const char* kVersion = "cmwlab 1.0";

const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

/// One line of the fixed-column result CSV shared by refine/suite/pwdb.
struct CsvRow {
  std::string instance;
  int n = 0;
  double primal = 0.0, dual = 0.0, psi_norm = 0.0, lambda = 0.0,
         residual_ip = 0.0;
  std::string status;
};

void write_rows_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "instance,n,primal,dual,psi_norm,lambda,residual_ip,status\n";
  char buf[256];
  for (const CsvRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n",
                  r.instance.c_str(), r.n, r.primal, r.dual, r.psi_norm,
                  r.lambda, r.residual_ip, r.status.c_str());
    out << buf;
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

std::string group_label(const std::vector<double>& key) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < key.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", key[i]);
    s += buf;
  }
  return s + ")";
}

// ---------------------------------------------------------------------- solve

int cmd_solve(const std::string& path, const std::string& csv,
              const std::string& json_path, double tol) {
  InstanceSpec spec;
  CmInstance inst;
  try {
    spec = load_spec(path);
    inst = generate_cm(spec);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  }
  const std::string kind = kind_name(spec);
  const std::string hash = spec_hash(spec);

  PrimalSolution ps;
  double dual = 0.0, resid = 0.0;
  MinNormPsi mn;
  try {
    ps = solve_primal(inst);
    if (ps.status == LpStatus::IterationLimit)
      throw std::runtime_error("transport LP hit the iteration limit");
    if (ps.status == LpStatus::Optimal) {
      dual = eval_dual_ip(inst, ps.cert, inst.second);
      resid = std::fabs(dual - ps.value);
      mn = min_sup_norm_psi(inst, ps.value);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }

  std::printf("instance  %s (file %s, hash %s)\n", kind.c_str(), path.c_str(),
              hash.c_str());
  std::printf("status    %s\n", status_name(ps.status));
  if (ps.status != LpStatus::Optimal) return kExitCheckFail;

  std::printf("primal    %.12g\n", ps.value + 0.0);
  std::printf("dual(IP)  %.12g   residual %.3g (tol %g)\n", dual, resid, tol);
  std::printf("lambda    %.12g\n", ps.cert.lambda);
  std::printf("budget    %.12g of rho = %.12g\n", ps.budget, inst.rho);
  const GroupIndex groups = inst.groups();
  std::printf("psi per group (extracted | least-norm, sup %.6g):\n",
              mn.sup_norm);
  for (std::size_t g = 0; g < groups.size(); ++g)
    std::printf("  v=%-18s %12.6g | %12.6g\n",
                group_label(groups.keys[g]).c_str(), ps.cert.psi[g],
                mn.status == LpStatus::Optimal ? mn.cert.psi[g] : 0.0);

  if (!csv.empty()) {
    // Positive-mass coupling entries, one row per used (atom, cell) pair.
    std::ofstream out(csv);
    if (!out) {
      std::fprintf(stderr, "input error: cannot open '%s' for writing\n",
                   csv.c_str());
      return kExitInput;
    }
    out << "atom,v,w_hat,w,gamma\n";
    char buf[192];
    for (std::size_t j = 0; j < inst.rows(); ++j)
      for (std::size_t k = 0; k < inst.cols(); ++k)
        if (ps.coupling.at(j, k) > 0.0) {
          std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g,%.12g\n", j,
                        inst.first.atoms[j].v[0], inst.first.atoms[j].w,
                        inst.second.w_of(k), ps.coupling.at(j, k));
          out << buf;
        }
  }

  if (!json_path.empty()) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = "solve";
    j["instance"] = kind;
    j["spec_hash"] = hash;
    j["seed"] = spec.seed;
    j["status"] = status_name(ps.status);
    j["primal"] = ps.value;
    j["dual_ip"] = dual;
    j["residual_ip"] = resid;
    j["lambda"] = ps.cert.lambda;
    j["psi"] = ps.cert.psi;
    j["psi_least_norm"] = mn.cert.psi;
    j["psi_sup_norm"] = mn.sup_norm;
    write_json_file(json_path, j);
  }
  return resid <= tol ? kExitPass : kExitCheckFail;
}

// --------------------------------------------------------------------- refine

int cmd_refine(const std::string& kind, std::vector<int> sizes,
               std::vector<int> j_sizes, double R, const std::string& csv,
               const std::string& json_path, double tol) {
  std::function<CmInstance(int)> family;
  if (kind == "example32") {
    family = [](int n) {
      return generate_cm({Example32Params{0.5, n}, 0});
    };
  } else if (kind == "example32-mod") {
    family = [](int n) {
      return generate_cm({Example32ModParams{4.0, n}, 0});
    };
  } else if (kind == "lemma31") {
    if (sizes.empty()) sizes = std::move(j_sizes);
    family = [R](int J) {
      return generate_cm({Lemma31Params{J, R, 21}, 0});
    };
  } else {
    std::fprintf(stderr,
                 "input error: unknown refine family '%s' "
                 "(example32, example32-mod, lemma31)\n",
                 kind.c_str());
    return kExitInput;
  }
  if (sizes.empty()) sizes = {4, 8, 16, 32};
  for (int n : sizes)
    if (n < 1) {
      std::fprintf(stderr, "input error: sizes must be positive\n");
      return kExitInput;
    }

  std::vector<RefinementRow> rows;
  try {
    rows = refinement_study(family, sizes);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }

  std::printf("family %s\n", kind.c_str());
  std::printf("%6s %16s %16s %14s %12s %s\n", "n", "primal", "dual(IP)",
              "|psi|_inf", "lambda", "status");
  bool ok = true;
  std::vector<CsvRow> csv_rows;
  for (const RefinementRow& r : rows) {
    std::printf("%6d %16.10g %16.10g %14.8g %12.6g %s\n", r.size,
                r.primal + 0.0, r.dual_ip + 0.0, r.psi_sup_norm, r.lambda,
                status_name(r.status));
    ok = ok && r.status == LpStatus::Optimal &&
         std::fabs(r.dual_ip - r.primal) <= tol;
    CsvRow row;
    row.instance = kind;
    row.n = r.size;
    row.primal = r.primal;
    row.dual = r.dual_ip;
    row.psi_norm = r.psi_sup_norm;
    row.lambda = r.lambda;
    row.residual_ip = std::fabs(r.dual_ip - r.primal);
    row.status = status_name(r.status);
    csv_rows.push_back(std::move(row));
  }

  // Log-log growth fit of the multiplier norm, a quick blow-up indicator.
  if (rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const RefinementRow& r : rows)
      if (r.psi_sup_norm > 0.0) {
        const double x = std::log(double(r.size)), y = std::log(r.psi_sup_norm);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++cnt;
      }
    if (cnt >= 2 && cnt * sxx - sx * sx > 1e-12)
      std::printf("psi growth exponent ~ %.3f (log-log fit)\n",
                  (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx));
  }

  if (!csv.empty()) write_rows_csv(csv, csv_rows);
  if (!json_path.empty()) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = "refine";
    j["family"] = kind;
    j["rows"] = nlohmann::json::array();
    for (const RefinementRow& r : rows) {
      InstanceSpec spec;
      if (kind == "example32")
        spec.kind = Example32Params{0.5, r.size};
      else if (kind == "example32-mod")
        spec.kind = Example32ModParams{4.0, r.size};
      else
        spec.kind = Lemma31Params{r.size, R, 21};
      j["rows"].push_back({{"n", r.size},
                           {"primal", r.primal},
                           {"dual_ip", r.dual_ip},
                           {"psi_sup_norm", r.psi_sup_norm},
                           {"lambda", r.lambda},
                           {"status", status_name(r.status)},
                           {"spec_hash", spec_hash(spec)}});
    }
    write_json_file(json_path, j);
  }
  return ok ? kExitPass : kExitCheckFail;
}

// ----------------------------------------------------------------------- pwdb

int cmd_pwdb(const std::string& path, const std::string& csv,
             const std::string& json_path) {
  InstanceSpec spec;
  UncertainProgram prog;
  try {
    spec = load_spec(path);
    const GeneratedInstance gen = generate(spec);
    if (!std::holds_alternative<UncertainProgram>(gen))
      throw std::invalid_argument(
          "pwdb needs a custom-pw instance file, got kind '" +
          kind_name(spec) + "'");
    prog = std::get<UncertainProgram>(gen);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  }
  const std::string hash = spec_hash(spec);

  PwResult pw;
  SlaterReport slater;
  bool bounded = false, regular = false, have_db = false;
  double db = 0.0, gap = 0.0;
  try {
    slater = check_prop41_i(prog);
    bounded = check_prop41_ii(prog);
    pw = primal_worst(prog);
    if (pw.status == LpStatus::IterationLimit)
      throw std::runtime_error("primal-worst solve hit the iteration limit");
    if (pw.status == LpStatus::Optimal) {
      const DbPoint pt = db_construct_from_kkt(prog);
      db = db_evaluate(prog, pt);
      gap = std::fabs(pw.value - db);
      regular = check_prop42(prog, pt);
      have_db = true;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }

  std::printf("instance  custom-pw (file %s, hash %s)\n", path.c_str(),
              hash.c_str());
  std::printf("status    %s\n", status_name(pw.status));
  if (have_db) {
    std::printf("pw value  %.12g\n", pw.value);
    std::printf("db value  %.12g   gap %.3g\n", db, gap);
  }
  std::printf("strict feasibility (i): %s (margin %.6g)\n",
              slater.holds ? "holds" : "fails", slater.margin);
  std::printf("bounded feasible set (ii): %s\n", bounded ? "holds" : "fails");
  std::printf("dual regularity: %s\n", regular ? "holds" : "fails");

  if (!csv.empty()) {
    CsvRow row;
    row.instance = "custom-pw";
    row.n = static_cast<int>(prog.n);
    row.primal = pw.value;
    row.dual = db;
    row.residual_ip = gap;
    row.status = status_name(pw.status);
    write_rows_csv(csv, {row});
  }
  if (!json_path.empty()) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = "pwdb";
    j["spec_hash"] = hash;
    j["seed"] = spec.seed;
    j["status"] = status_name(pw.status);
    j["pw_value"] = pw.value;
    j["db_value"] = db;
    j["gap"] = gap;
    j["strict_feasibility"] = slater.holds;
    j["slater_margin"] = slater.margin;
    j["bounded_feasible_set"] = bounded;
    j["dual_regularity"] = regular;
    j["subgradient_iters"] = pw.subgradient_iters;
    write_json_file(json_path, j);
  }
  // A reporting command: condition failures are findings, not errors.
  return kExitPass;
}

// ---------------------------------------------------------------------- suite

int cmd_suite(const std::string& only, const std::string& csv,
              const std::string& json_path, unsigned long long seed) {
  SuiteReport rep;
  try {
    rep = run_suite(seed, only);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }

  for (const SuiteRow& row : rep.rows)
    std::printf("%s %-24s (%6.2fs) %s\n", row.pass ? "PASS" : "FAIL",
                row.name.c_str(), row.seconds, row.detail.c_str());
  std::size_t passed = 0;
  for (const SuiteRow& row : rep.rows) passed += row.pass ? 1 : 0;
  std::printf("%zu/%zu rows passed (seed %llu)\n", passed, rep.rows.size(),
              seed);
  if (!rep.all_pass())
    for (const SuiteRow& row : rep.rows)
      if (!row.pass)
        std::fprintf(stderr, "failing row: %s\n", row.name.c_str());

  if (!csv.empty()) {
    std::vector<CsvRow> rows;
    for (const SuiteRow& r : rep.rows) {
      CsvRow row;
      row.instance = r.name;
      row.status = r.pass ? "pass" : "fail";
      rows.push_back(std::move(row));
    }
    write_rows_csv(csv, rows);
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out)
      throw std::runtime_error("cannot open '" + json_path + "' for writing");
    out << suite_report_json(rep);
  }
  return rep.all_pass() ? kExitPass : kExitCheckFail;
}

// ------------------------------------------------------------------------ gen

int cmd_gen(const std::string& kind, const std::string& json_path,
            unsigned long long seed, int n, double eps, int J, double R,
            int depth, bool quad) {
  InstanceSpec spec;
  spec.seed = seed;
  try {
    if (kind == "example32")
      spec.kind = Example32Params{eps > 0 ? eps : 0.5, n > 0 ? n : 4};
    else if (kind == "example32-mod")
      spec.kind = Example32ModParams{eps > 0 ? eps : 4.0, n > 0 ? n : 4};
    else if (kind == "lemma31")
      spec.kind = Lemma31Params{J > 0 ? J : 4, R > 0 ? R : 10.0, 21};
    else if (kind == "lemma34")
      spec.kind = Lemma34Params{};
    else if (kind == "example35")
      spec.kind = Example35Params{n > 0 ? n : 16, 1.0};
    else if (kind == "fat-cantor")
      spec.kind = FatCantorParams{depth > 0 ? depth : 3, n > 0 ? n : 64, 1.0};
    else if (kind == "example33")
      spec.kind = Example33Params{R > 0 ? R : 10.0, n > 0 ? n : 200};
    else if (kind == "custom-cm")
      spec.kind = CustomCmParams{random_cm_instance(seed)};
    else if (kind == "custom-pw")
      spec.kind = CustomPwParams{random_uncertain_program(seed, quad)};
    else
      throw std::invalid_argument("unknown family '" + kind + "'");

    const std::string path = json_path.empty() ? kind + ".json" : json_path;
    save_spec(spec, path);
    std::printf("wrote %s (kind %s, seed %llu, hash %s)\n", path.c_str(),
                kind.c_str(), seed, spec_hash(spec).c_str());
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional-moment transport laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string csv, json_path, only, path, kind;
  double tol = 1e-8, R = 10.0, eps = 0.0;
  unsigned long long seed = 1;
  int n = 0, J = 0, depth = 0;
  bool quad = false;
  std::vector<int> sizes, j_sizes;

  CLI::App* solve = app.add_subcommand("solve", "solve one transport instance");
  solve->add_option("file", path, "instance file (JSON)")->required();
  solve->add_option("--csv", csv, "write the optimal coupling as CSV");
  solve->add_option("--json", json_path, "write a JSON report");
  solve->add_option("--tol", tol, "interchange-identity tolerance");

  CLI::App* refine = app.add_subcommand("refine", "size-indexed family study");
  refine->add_option("kind", kind, "example32 | example32-mod | lemma31")
      ->required();
  refine->add_option("sizes", sizes, "family sizes");
  refine->add_option("--J", j_sizes, "sizes for lemma31");
  refine->add_option("--R", R, "grid radius for lemma31");
  refine->add_option("--csv", csv, "write the result table as CSV");
  refine->add_option("--json", json_path, "write a JSON report");
  refine->add_option("--tol", tol, "interchange-identity tolerance");

  CLI::App* pwdb =
      app.add_subcommand("pwdb", "robust primal-worst vs dual-best report");
  pwdb->add_option("file", path, "custom-pw instance file")->required();
  pwdb->add_option("--csv", csv, "write the result row as CSV");
  pwdb->add_option("--json", json_path, "write a JSON report");

  CLI::App* suite = app.add_subcommand("suite", "run the acceptance matrix");
  suite->add_option("--only", only, "run rows whose name contains this");
  suite->add_option("--seed", seed, "randomized-battery seed");
  suite->add_option("--csv", csv, "write verdict rows as CSV");
  suite->add_option("--json", json_path, "write the JSON report");

  CLI::App* gen = app.add_subcommand("gen", "write an instance file");
  gen->add_option("kind", kind, "family tag, e.g. example32, custom-pw")
      ->required();
  gen->add_option("--seed", seed, "seed for randomized families");
  gen->add_option("--json", json_path, "output path (default <kind>.json)");
  gen->add_option("--n", n, "size parameter");
  gen->add_option("--eps", eps, "budget slack parameter");
  gen->add_option("--J", J, "group count (lemma31)");
  gen->add_option("--R", R, "grid radius");
  gen->add_option("--depth", depth, "removal depth (fat-cantor)");
  gen->add_flag("--quad", quad, "quadratic objective (custom-pw)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(path, csv, json_path, tol);
    if (refine->parsed())
      return cmd_refine(kind, sizes, j_sizes, R, csv, json_path, tol);
    if (pwdb->parsed()) return cmd_pwdb(path, csv, json_path);
    if (suite->parsed()) return cmd_suite(only, csv, json_path, seed);
    if (gen->parsed())
      return cmd_gen(kind, json_path, seed, n, eps, J, R, depth, quad);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitInput;
}
