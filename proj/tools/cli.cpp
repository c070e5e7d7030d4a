// Copyright 2026 The Multisec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "multisec/core_dp.hpp"
#include "multisec/montecarlo.hpp"

namespace multisec::cli {
namespace {

using Json = nlohmann::ordered_json;

enum class Format { kCsv, kJson };

constexpr int kProbabilityDigits = 8;
constexpr int kThetaDigits = 9;
constexpr int kLimitDigits = 7;
constexpr int kAsymDigits = 9;
constexpr double kVerdictSigmas = 4.0;

// Value from a printed decimal, so JSON numbers equal the CSV text.
Json number(const std::string& decimal) { return Json::parse(decimal); }

std::string radius_text(const Real& r) {
  if (r == 0) return "0";
  return r.str(3, std::ios::scientific);
}

std::string rational_text(const Rational& q) { return q.get_str(); }

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    line += fields[i];
  }
  return line + '\n';
}

// Runs tasks [0, count) on up to `threads` workers. The first failure in
// index order is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_exact_size(const ProblemSpec& spec) {
  if (spec.stream_length() > kExactStreamCap) {
    throw SizeLimitExceeded(
        "exact arithmetic limited to m * n <= " +
        std::to_string(kExactStreamCap) + " (got " +
        std::to_string(spec.stream_length()) + ")");
  }
}

struct Cell {
  int k_star = 1;
  std::string p_success;
  std::optional<Rational> p_exact;
};

Cell solve_cell(int m, int n, bool exact, int digits) {
  Cell cell;
  if (exact) {
    const ProblemSpec spec{m, n, Arithmetic::kExactRational};
    validate(spec);
    check_exact_size(spec);
    const auto sol = solve<Rational>(spec);
    cell.k_star = sol.k_star;
    cell.p_success = truncate_decimal(sol.p_success, digits);
    cell.p_exact = sol.p_success;
  } else {
    const auto sol = solve<double>({m, n});
    cell.k_star = sol.k_star;
    cell.p_success = truncate_decimal(sol.p_success, digits);
  }
  return cell;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  int m = 1;
  int n = 1;
  bool exact = false;
  int digits = kProbabilityDigits;
};

std::string cmd_solve(const SolveArgs& a, Format format) {
  const Cell cell = solve_cell(a.m, a.n, a.exact, a.digits);
  if (format == Format::kJson) {
    Json j;
    j["m"] = a.m;
    j["n"] = a.n;
    j["k_star"] = cell.k_star;
    j["p_success"] = number(cell.p_success);
    if (cell.p_exact) j["p_exact"] = rational_text(*cell.p_exact);
    return j.dump(2) + '\n';
  }
  std::vector<std::string> head{"m", "n", "k_star", "p_success"};
  std::vector<std::string> row{std::to_string(a.m), std::to_string(a.n),
                               std::to_string(cell.k_star), cell.p_success};
  if (cell.p_exact) {
    head.push_back("p_exact");
    row.push_back(rational_text(*cell.p_exact));
  }
  return join(head) + join(row);
}

// ---------------------------------------------------------------------------

struct TableArgs {
  std::string m_range = "1..10";
  std::vector<int> ns{100, 1000, 10000};
  bool exact = false;
  bool asym = true;
  int order = kDefaultOrder;
  int digits = kProbabilityDigits;
  unsigned threads = 0;
};

struct Limits {
  std::string theta;
  std::string p_limit;
};

std::string cmd_table(const TableArgs& a, Format format) {
  const auto [m_lo, m_hi] = parse_range(a.m_range);
  const int rows = m_hi - m_lo + 1;
  const std::size_t cols = a.ns.size();
  for (int n : a.ns) {
    if (n < 1) throw InvalidSpec("n must be >= 1");
  }

  std::vector<Cell> cells(rows * cols);
  std::vector<Limits> limits(a.asym ? rows : 0);
  // Asymptotic rows first: they dominate the run time.
  const std::size_t asym_tasks = limits.size();
  parallel_for(asym_tasks + cells.size(), a.threads, [&](std::size_t t) {
    if (t < asym_tasks) {
      const int m = m_lo + static_cast<int>(t);
      const auto sol = solve_asymptotics(m, a.order, kThetaDigits);
      limits[t] = {truncate_decimal(sol.theta, kThetaDigits),
                   truncate_decimal(sol.p_limit, kLimitDigits)};
      return;
    }
    const std::size_t c = t - asym_tasks;
    const int m = m_lo + static_cast<int>(c / cols);
    cells[c] = solve_cell(m, a.ns[c % cols], a.exact, a.digits);
  });

  std::vector<std::string> notes;
  const bool flagged_cell =
      m_lo <= 4 && 4 <= m_hi &&
      std::find(a.ns.begin(), a.ns.end(), 100) != a.ns.end();
  if (flagged_cell) {
    const std::size_t c =
        (4 - m_lo) * cols + (std::find(a.ns.begin(), a.ns.end(), 100) -
                             a.ns.begin());
    notes.push_back("m=4 n=100: P_100 = " + cells[c].p_success +
                    " is confirmed by simulation; the commonly reproduced "
                    "value 0.93490075 for this cell is a suspected erratum");
  }

  if (format == Format::kJson) {
    Json out;
    out["rows"] = Json::array();
    for (int r = 0; r < rows; ++r) {
      Json row;
      row["m"] = m_lo + r;
      row["cells"] = Json::array();
      for (std::size_t c = 0; c < cols; ++c) {
        const Cell& cell = cells[r * cols + c];
        Json j;
        j["n"] = a.ns[c];
        j["k_star"] = cell.k_star;
        j["p_success"] = number(cell.p_success);
        if (cell.p_exact) j["p_exact"] = rational_text(*cell.p_exact);
        row["cells"].push_back(std::move(j));
      }
      if (a.asym) {
        row["theta_lim"] = limits[r].theta;
        row["p_lim"] = limits[r].p_limit;
      }
      out["rows"].push_back(std::move(row));
    }
    out["notes"] = notes;
    return out.dump(2) + '\n';
  }

  std::vector<std::string> head{"m"};
  for (int n : a.ns) head.push_back("k_" + std::to_string(n));
  if (a.asym) head.push_back("theta_lim");
  for (int n : a.ns) head.push_back("P_" + std::to_string(n));
  if (a.asym) head.push_back("P_lim");
  std::string text = join(head);
  for (int r = 0; r < rows; ++r) {
    std::vector<std::string> row{std::to_string(m_lo + r)};
    for (std::size_t c = 0; c < cols; ++c) {
      row.push_back(std::to_string(cells[r * cols + c].k_star));
    }
    if (a.asym) row.push_back(limits[r].theta);
    for (std::size_t c = 0; c < cols; ++c) {
      row.push_back(cells[r * cols + c].p_success);
    }
    if (a.asym) row.push_back(limits[r].p_limit);
    text += join(row);
  }
  for (const auto& note : notes) text += "# note: " + note + '\n';
  return text;
}

// ---------------------------------------------------------------------------

struct AsymArgs {
  int m = 1;
  int order = kDefaultOrder;
  int digits = kAsymDigits;
};

std::string cmd_asym(const AsymArgs& a, Format format) {
  if (a.m < 1) throw InvalidSpec("m must be >= 1");
  if (a.digits < 1) throw std::invalid_argument("digits must be >= 1");
  const auto sol =
      solve_asymptotics(a.m, a.order, static_cast<unsigned>(a.digits));
  const std::string theta = truncate_decimal(sol.theta, a.digits);
  const std::string p = truncate_decimal(sol.p_limit, a.digits);
  if (format == Format::kJson) {
    Json j;
    j["m"] = a.m;
    j["order"] = a.order;
    j["digits"] = a.digits;
    j["theta_lim"] = theta;
    j["theta_radius"] = radius_text(sol.theta_radius);
    j["p_lim"] = p;
    j["p_radius"] = radius_text(sol.p_radius);
    return j.dump(2) + '\n';
  }
  return join({"m", "order", "digits", "theta_lim", "theta_radius", "p_lim",
               "p_radius"}) +
         join({std::to_string(a.m), std::to_string(a.order),
               std::to_string(a.digits), theta, radius_text(sol.theta_radius),
               p, radius_text(sol.p_radius)});
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  int m = 1;
  int n = 1;
  std::optional<int> k;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  int digits = kProbabilityDigits;
};

std::string cmd_simulate(const SimulateArgs& a, Format format) {
  const ProblemSpec spec{a.m, a.n};
  validate(spec);
  const int k = a.k ? *a.k : solve<double>(spec).k_star;
  const double reference = success_probability<double>(spec, k);
  const auto est = estimate({spec, k, a.trials, a.seed, a.threads});
  const double gap = std::abs(est.p_hat - reference);
  const bool pass = est.std_err > 0 ? gap <= kVerdictSigmas * est.std_err
                                    : gap <= 1e-12;
  const std::string p_hat = truncate_decimal(est.p_hat, a.digits);
  const std::string std_err = truncate_decimal(est.std_err, a.digits + 2);
  const std::string p_dp = truncate_decimal(reference, a.digits);
  const std::string verdict = pass ? "PASS" : "FAIL";
  if (format == Format::kJson) {
    Json j;
    j["m"] = a.m;
    j["n"] = a.n;
    j["k"] = k;
    j["trials"] = a.trials;
    j["seed"] = a.seed;
    j["p_hat"] = number(p_hat);
    j["std_err"] = number(std_err);
    j["p_success"] = number(p_dp);
    j["verdict"] = verdict;
    return j.dump(2) + '\n';
  }
  return join({"m", "n", "k", "trials", "seed", "p_hat", "std_err",
               "p_success", "verdict"}) +
         join({std::to_string(a.m), std::to_string(a.n), std::to_string(k),
               std::to_string(a.trials), std::to_string(a.seed), p_hat,
               std_err, p_dp, verdict});
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  int m = 1;
  int n = 1;
  std::uint64_t cap = kDefaultArrangementCap;
  int digits = kProbabilityDigits;
};

std::string cmd_oracle(const OracleArgs& a, Format format) {
  const ProblemSpec spec{a.m, a.n, Arithmetic::kExactRational};
  validate(spec);
  const auto best = exhaustive_optimal(spec, a.cap);
  const auto dp = solve<Rational>(spec);
  const auto tables = compute_tables<Rational>(spec);

  struct Row {
    std::string exact;
    std::string decimal;
    bool dp_match;
  };
  std::vector<Row> rows;
  bool all_match = true;
  for (int k = 1; k <= a.n; ++k) {
    const Rational& p = best.by_threshold[k - 1];
    const bool match = p == success_probability(tables, k);
    all_match = all_match && match;
    rows.push_back({rational_text(p), truncate_decimal(p, a.digits), match});
  }
  const bool agree = best.threshold == dp.k_star;
  const std::string count = arrangement_count(spec).get_str();

  if (format == Format::kJson) {
    Json j;
    j["m"] = a.m;
    j["n"] = a.n;
    j["arrangements"] = count;
    j["thresholds"] = Json::array();
    for (int k = 1; k <= a.n; ++k) {
      const Row& r = rows[k - 1];
      j["thresholds"].push_back({{"k", k},
                                 {"p_exact", r.exact},
                                 {"p_success", number(r.decimal)},
                                 {"dp_match", r.dp_match}});
    }
    j["argmax"] = best.threshold;
    j["k_star"] = dp.k_star;
    j["agree"] = agree && all_match;
    return j.dump(2) + '\n';
  }
  std::string text = join({"k", "p_exact", "p_success", "dp_match"});
  for (int k = 1; k <= a.n; ++k) {
    const Row& r = rows[k - 1];
    text += join({std::to_string(k), r.exact, r.decimal,
                  r.dp_match ? "yes" : "no"});
  }
  text += "# arrangements=" + count + " argmax=" +
          std::to_string(best.threshold) + " k_star=" +
          std::to_string(dp.k_star) + " agree=" +
          (agree && all_match ? "yes" : "no") + '\n';
  return text;
}

// ---------------------------------------------------------------------------

struct CurvesArgs {
  int m = 1;
  int n = 1;
  int digits = kProbabilityDigits;
};

std::string cmd_curves(const CurvesArgs& a, Format format) {
  const ProblemSpec spec{a.m, a.n};
  validate(spec);
  const auto tables = compute_tables<double>(spec);
  auto value = [&](double x) { return truncate_decimal(x, a.digits); };

  std::vector<std::string> head{"k"};
  for (const char* name : {"psi", "phi", "theta"}) {
    for (int i = 1; i <= a.m; ++i) {
      head.push_back(std::string(name) + "_" + std::to_string(i));
    }
  }
  head.push_back("P_k");

  std::vector<std::vector<std::string>> rows;
  for (int k = 1; k <= a.n; ++k) {
    std::vector<std::string> row{std::to_string(k)};
    for (const auto* table : {&tables.psi, &tables.phi, &tables.theta}) {
      for (int i = 1; i <= a.m; ++i) row.push_back(value((*table)(i, k)));
    }
    row.push_back(value(success_probability(tables, k)));
    rows.push_back(std::move(row));
  }

  if (format == Format::kJson) {
    Json j;
    j["m"] = a.m;
    j["n"] = a.n;
    j["columns"] = head;
    j["rows"] = Json::array();
    for (const auto& row : rows) {
      Json r = Json::array();
      r.push_back(std::stoi(row[0]));
      for (std::size_t c = 1; c < row.size(); ++c) r.push_back(number(row[c]));
      j["rows"].push_back(std::move(r));
    }
    return j.dump() + '\n';
  }
  std::string text = join(head);
  for (const auto& row : rows) text += join(row);
  return text;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string truncate_decimal(const Rational& value, int digits) {
  if (digits < 0) throw std::invalid_argument("digits must be >= 0");
  if (value < 0) throw std::invalid_argument("negative value");
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled;
  const Rational shifted = value * scale;
  mpz_fdiv_q(scaled.get_mpz_t(), shifted.get_num_mpz_t(),
             shifted.get_den_mpz_t());
  std::string s = scaled.get_str();
  if (digits == 0) return s;
  if (s.size() <= static_cast<std::size_t>(digits)) {
    s.insert(0, digits + 1 - s.size(), '0');
  }
  s.insert(s.size() - digits, 1, '.');
  return s;
}

std::string truncate_decimal(const Real& value, int digits) {
  if (!isfinite(value)) throw std::invalid_argument("non-finite value");
  Rational q;
  mpfr_get_q(q.get_mpq_t(), value.backend().data());
  return truncate_decimal(q, digits);
}

std::string truncate_decimal(double value, int digits) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value");
  return truncate_decimal(Rational(value), digits);
}

std::pair<int, int> parse_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) {
      throw std::invalid_argument("bad range '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  const int lo = to_int(text.substr(0, dots));
  const int hi = dots == std::string::npos ? lo : to_int(text.substr(dots + 2));
  if (lo < 1 || hi < lo) {
    throw std::invalid_argument("range '" + text + "' must satisfy 1 <= a <= b");
  }
  return {lo, hi};
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Multi-copy secretary problem: thresholds, probabilities, "
               "asymptotics and validation."};
  app.name("multisec");
  app.require_subcommand(1);

  std::string format_name = "csv";
  std::string out_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "Write output to this file");
  };

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Optimal threshold and P");
  solve_cmd->add_option("--m", solve_args.m, "Copies per candidate")->required();
  solve_cmd->add_option("--n", solve_args.n, "Candidates")->required();
  solve_cmd->add_flag("--exact", solve_args.exact, "Exact rational arithmetic");
  solve_cmd->add_option("--digits", solve_args.digits, "Decimal digits");
  add_common(solve_cmd);

  TableArgs table_args;
  bool no_asym = false;
  auto* table_cmd = app.add_subcommand("table", "Threshold/probability table");
  table_cmd->add_option("--m", table_args.m_range, "Range a..b of m");
  table_cmd->add_option("--n", table_args.ns, "Values of n")->delimiter(',');
  table_cmd->add_flag("--exact", table_args.exact, "Exact rational arithmetic");
  table_cmd->add_flag("--no-asym", no_asym, "Omit the limit columns");
  table_cmd->add_option("--order", table_args.order, "Series order");
  table_cmd->add_option("--digits", table_args.digits, "Digits for P_n");
  table_cmd->add_option("--threads", table_args.threads,
                        "Worker threads (0: all cores)");
  add_common(table_cmd);

  AsymArgs asym_args;
  auto* asym_cmd = app.add_subcommand("asym", "Limits of k*/n and P");
  asym_cmd->add_option("--m", asym_args.m, "Copies per candidate")->required();
  asym_cmd->add_option("--order", asym_args.order, "Series order");
  asym_cmd->add_option("--digits", asym_args.digits, "Decimal digits");
  add_common(asym_cmd);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of P");
  sim_cmd->add_option("--m", sim_args.m, "Copies per candidate")->required();
  sim_cmd->add_option("--n", sim_args.n, "Candidates")->required();
  sim_cmd->add_option("--k", sim_args.k, "Threshold (default: optimal)");
  sim_cmd->add_option("--trials", sim_args.trials, "Number of trials");
  sim_cmd->add_option("--seed", sim_args.seed, "Base seed");
  sim_cmd->add_option("--threads", sim_args.threads,
                      "Worker threads (0: all cores)");
  sim_cmd->add_option("--digits", sim_args.digits, "Decimal digits");
  add_common(sim_cmd);

  OracleArgs oracle_args;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Exhaustive enumeration of arrangements");
  oracle_cmd->add_option("--m", oracle_args.m, "Copies per candidate")
      ->required();
  oracle_cmd->add_option("--n", oracle_args.n, "Candidates")->required();
  oracle_cmd->add_option("--cap", oracle_args.cap, "Arrangement limit");
  oracle_cmd->add_option("--digits", oracle_args.digits, "Decimal digits");
  add_common(oracle_cmd);

  CurvesArgs curves_args;
  auto* curves_cmd =
      app.add_subcommand("curves", "Psi, Phi, Theta and P(k) for k = 1..n");
  curves_cmd->add_option("--m", curves_args.m, "Copies per candidate")
      ->required();
  curves_cmd->add_option("--n", curves_args.n, "Candidates")->required();
  curves_cmd->add_option("--digits", curves_args.digits, "Decimal digits");
  add_common(curves_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }
  table_args.asym = !no_asym;
  const Format format = format_name == "json" ? Format::kJson : Format::kCsv;

  std::string text;
  try {
    for (int digits : {solve_args.digits, table_args.digits, sim_args.digits,
                       oracle_args.digits, curves_args.digits}) {
      if (digits < 0 || digits > 60) {
        throw std::invalid_argument("--digits must be in 0..60");
      }
    }
    if (solve_cmd->parsed()) {
      text = cmd_solve(solve_args, format);
    } else if (table_cmd->parsed()) {
      text = cmd_table(table_args, format);
    } else if (asym_cmd->parsed()) {
      text = cmd_asym(asym_args, format);
    } else if (sim_cmd->parsed()) {
      text = cmd_simulate(sim_args, format);
    } else if (oracle_cmd->parsed()) {
      text = cmd_oracle(oracle_args, format);
    } else {
      text = cmd_curves(curves_args, format);
    }
  } catch (const SizeLimitExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const CertificationError& e) {
    err << "certification failed: " << e.what() << '\n';
    return kCertification;
  } catch (const UnsolvableSeries& e) {
    err << "certification failed: " << e.what() << '\n';
    return kCertification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  if (out_path.empty()) {
    out << text;
    return kSuccess;
  }
  std::ofstream file(out_path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write " << out_path << '\n';
    return kUsage;
  }
  return kSuccess;
}

}  // namespace multisec::cli
