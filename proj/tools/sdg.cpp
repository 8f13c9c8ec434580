// Command-line front end: solve, sweep, verify, export.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "sdg/sdg.hpp"

namespace {

using namespace sdg;

constexpr int kExitFail = 1, kExitInvalid = 2, kExitBudget = 3;

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::kStepTooLarge:
    case ErrorCode::kBudgetExceeded:
    case ErrorCode::kDimensionTooHigh:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kKernelTooFast:
    case ErrorCode::kNonContraction:
    case ErrorCode::kSingularSystem:
      return kExitBudget;
    default:
      return kExitInvalid;
  }
}

enum class Family { kOther, kG1, kHalf, kTildeHalf };

struct GameSource {
  std::string label;
  AnyGame game;
  Family family = Family::kOther;
  Side side = Side::kMinus;
  // Exit payoff k for half games, built-in h for the general-signal halves.
  double param = 0.0;
};

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used == s.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "bad " + what + " '" + s + "'");
}

GameSource resolve_game(const std::string& name) {
  GameSource src;
  src.label = name;
  auto suffix = [&](const std::string& prefix) -> std::optional<double> {
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    return parse_number(name.substr(prefix.size()), "game parameter");
  };
  if (name == "g1") {
    src.game = build_g1();
    src.family = Family::kG1;
  } else if (name == "g1-tilde") {
    src.game = build_g1_tilde();
  } else if (name == "perfect-test") {
    src.game = build_perfect_test();
  } else if (auto k = suffix("half-minus:"); k) {
    src = {name, build_half(Side::kMinus, *k), Family::kHalf, Side::kMinus, *k};
  } else if (auto k2 = suffix("half-plus:"); k2) {
    src = {name, build_half(Side::kPlus, *k2), Family::kHalf, Side::kPlus, *k2};
  } else if (auto h = suffix("tilde-half-minus:"); h) {
    src = {name, build_tilde_half(Side::kMinus, *h), Family::kTildeHalf, Side::kMinus, *h};
  } else if (auto h2 = suffix("tilde-half-plus:"); h2) {
    src = {name, build_tilde_half(Side::kPlus, *h2), Family::kTildeHalf, Side::kPlus, *h2};
  } else {
    src.game = load_game(name);
  }
  return src;
}

const std::vector<std::string>& state_names(const AnyGame& g) {
  return std::visit([](const auto& x) -> const std::vector<std::string>& { return x.states; }, g);
}

// A state name, a comma list of weights, or name=weight pairs separated by commas.
Belief parse_belief(const std::string& text, const GameSource& src) {
  const auto& names = state_names(src.game);
  const std::size_t n = names.size();
  for (std::size_t k = 0; k < n; ++k)
    if (names[k] == text) return Belief::point(n, k);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  std::vector<double> w(n, 0.0);
  if (!parts.empty() && parts[0].find('=') != std::string::npos) {
    for (const auto& part : parts) {
      const auto eq = part.rfind('=');
      if (eq == std::string::npos) fail(ErrorCode::kInvalidArgument, "mixed belief syntax in '" + text + "'");
      const std::string key = part.substr(0, eq);
      const auto it = std::find(names.begin(), names.end(), key);
      if (it == names.end()) fail(ErrorCode::kInvalidArgument, "unknown state '" + key + "'");
      w[it - names.begin()] += parse_number(part.substr(eq + 1), "belief weight");
    }
  } else {
    if (parts.size() != n)
      fail(ErrorCode::kDimensionMismatch, "belief '" + text + "' needs " + std::to_string(n) + " weights");
    for (std::size_t k = 0; k < n; ++k) w[k] = parse_number(parts[k], "belief weight");
  }
  return Belief(std::move(w));
}

std::string default_belief(const GameSource& src) {
  const auto& names = state_names(src.game);
  if (src.family == Family::kG1) return "--";
  if (src.family != Family::kOther) return names[1];
  return names[0];
}

struct SolveSettings {
  std::string solver = "auto";
  std::size_t resolution = 0;
  double tol = 1e-8;
  double eps = 1e-6;
};

struct PointResult {
  double value = 0.0;
  double error_bound = 0.0;
  std::size_t iterations = 0;
  std::string solver;
  std::vector<double> x, y;
};

template <class Game>
StageModel<Game> stage_for(const GameSource& src, const Game& g, double lambda, double h) {
  if (src.family == Family::kTildeHalf) {
    if (std::abs(h - src.param) > 1e-12)
      fail(ErrorCode::kInvalidArgument, src.label + " is built for h = " + std::to_string(src.param));
    return discounted_stage(g, lambda, h);
  }
  return make_stage(g, lambda, h);
}

// Solves one (lambda, h) point and evaluates it at every belief.
std::vector<PointResult> solve_point(const GameSource& src, double lambda, double h, const std::vector<Belief>& beliefs,
                                     const SolveSettings& s, bool with_strategies) {
  std::string solver = s.solver;
  const bool reducible = src.family != Family::kOther;
  if (solver == "auto") solver = reducible ? "reduced" : "tree";
  if (solver == "reduced" && !reducible)
    fail(ErrorCode::kInvalidArgument, "the reduced solver only handles g1 and the half games");

  return std::visit(
      [&](const auto& game) {
        const auto model = stage_for(src, game, lambda, h);
        std::vector<PointResult> out(beliefs.size());
        auto finish = [&](std::size_t b, double value, double err, std::size_t it, const auto& vfn) {
          PointResult& r = out[b];
          r.value = value;
          r.error_bound = err;
          r.iterations = it;
          r.solver = solver;
          if (with_strategies) {
            StrategyPair sp = extract_strategy(model, vfn, beliefs[b]);
            r.x = std::move(sp.x);
            r.y = std::move(sp.y);
          }
        };
        if (solver == "tree") {
          TreeOptions opt;
          opt.eps = s.eps;
          auto vfn = [&](const Belief& p) { return solve_tree(model, p, opt).value; };
          for (std::size_t b = 0; b < beliefs.size(); ++b) {
            const TreeResult t = solve_tree(model, beliefs[b], opt);
            finish(b, t.value, t.error_bound, t.nodes, vfn);
          }
        } else if (solver == "grid") {
          GridOptions opt;
          if (s.resolution) opt.resolution = s.resolution;
          opt.tol = s.tol;
          const GridValueFn f = solve_grid(model, opt);
          for (std::size_t b = 0; b < beliefs.size(); ++b) finish(b, f(beliefs[b]), f.error_bound, f.iterations, f);
        } else if (solver == "reduced") {
          const ReducedOptions opt{s.resolution, s.tol};
          const double hr = src.family == Family::kTildeHalf ? src.param : h;
          if (src.family == Family::kG1) {
            const CoupledResult c = solve_coupled_g1(lambda, hr, opt);
            auto vfn = [&](const Belief& p) { return g1_value(c, p); };
            for (std::size_t b = 0; b < beliefs.size(); ++b)
              finish(b, vfn(beliefs[b]), c.error_bound, c.iterations, vfn);
          } else {
            const double k = src.family == Family::kHalf ? src.param : 0.0;
            const LineValueFn f = solve_reduced(src.side, lambda, hr, k, opt);
            auto vfn = [&](const Belief& p) { return half_value(src.side, k, f, p); };
            for (std::size_t b = 0; b < beliefs.size(); ++b) finish(b, vfn(beliefs[b]), f.error_bound, f.iterations, vfn);
          }
        } else {
          fail(ErrorCode::kInvalidArgument, "unknown solver '" + solver + "'");
        }
        return out;
      },
      src.game);
}

// "start:stop:points" (geometric) or a comma list.
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':'), b = text.rfind(':');
    const double lo = parse_number(text.substr(0, a), what), hi = parse_number(text.substr(a + 1, b - a - 1), what);
    const double pts = parse_number(text.substr(b + 1), what);
    if (!(lo > 0.0 && hi > 0.0) || pts < 1 || pts != std::floor(pts))
      fail(ErrorCode::kInvalidArgument, what + " grid needs positive bounds and a point count");
    const int n = static_cast<int>(pts);
    for (int k = 0; k < n; ++k)
      out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
  } else {
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item, what));
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, what + " grid is empty");
  for (double x : out)
    if (!(x > 0.0)) fail(ErrorCode::kInvalidArgument, what + " values must be positive");
  return out;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

struct Options {
  std::string game;
  double lambda = 0.0, h = 1.0;
  std::string lambda_grid, h_grid;
  std::vector<std::string> beliefs;
  SolveSettings solve;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string suite = "all";
  bool canary = false;
};

std::ostream& output(const Options& o, std::ofstream& file) {
  if (o.out.empty()) return std::cout;
  file.open(o.out);
  if (!file) fail(ErrorCode::kInvalidArgument, "cannot write " + o.out);
  return file;
}

std::vector<std::string> belief_labels(const Options& o, const GameSource& src) {
  return o.beliefs.empty() ? std::vector<std::string>{default_belief(src)} : o.beliefs;
}

int cmd_solve(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const GameSource src = resolve_game(o.game);
  const std::vector<std::string> labels = belief_labels(o, src);
  std::vector<Belief> beliefs;
  for (const auto& l : labels) beliefs.push_back(parse_belief(l, src));
  const std::vector<PointResult> res = solve_point(src, o.lambda, o.h, beliefs, o.solve, true);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream file;
  std::ostream& os = output(o, file);
  for (std::size_t b = 0; b < res.size(); ++b) {
    Json j;
    j["game"] = o.game;
    j["lambda"] = o.lambda;
    j["h"] = o.h;
    j["belief"] = labels[b];
    j["value"] = res[b].value;
    j["error_bound"] = res[b].error_bound;
    j["iterations"] = res[b].iterations;
    j["solver"] = res[b].solver;
    j["strategy1"] = res[b].x;
    j["strategy2"] = res[b].y;
    j["seed"] = o.seed;
    j["seconds"] = seconds;
    os << j.dump() << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const GameSource src = resolve_game(o.game);
  const std::vector<double> lambdas = o.lambda_grid.empty() ? std::vector<double>{o.lambda}
                                                            : parse_grid(o.lambda_grid, "lambda");
  const std::vector<double> hs = o.h_grid.empty() ? std::vector<double>{o.h} : parse_grid(o.h_grid, "h");
  for (double l : lambdas)
    for (double h : hs) check_discount(l, h);
  const std::vector<std::string> labels = belief_labels(o, src);
  std::vector<Belief> beliefs;
  for (const auto& l : labels) beliefs.push_back(parse_belief(l, src));

  struct Task {
    double lambda, h;
    std::vector<PointResult> rows;
    std::optional<Error> error;
  };
  std::vector<Task> tasks;
  for (double l : lambdas)
    for (double h : hs) tasks.push_back({l, h, {}, std::nullopt});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      try {
        tasks[t].rows = solve_point(src, tasks[t].lambda, tasks[t].h, beliefs, o.solve, false);
      } catch (const Error& e) {
        tasks[t].error = e;
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(o.threads, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const Task& t : tasks)
    if (t.error) throw *t.error;

  std::ofstream file;
  std::ostream& os = output(o, file);
  os << "game,lambda,h,belief,value,error_bound,iterations,solver,seed\n";
  for (const Task& t : tasks)
    for (std::size_t b = 0; b < t.rows.size(); ++b) {
      const PointResult& r = t.rows[b];
      os << csv_field(o.game) << ',' << fmt17(t.lambda) << ',' << fmt17(t.h) << ',' << csv_field(labels[b]) << ','
         << fmt17(r.value) << ',' << fmt17(r.error_bound) << ',' << r.iterations << ',' << r.solver << ',' << o.seed
         << '\n';
    }
  return 0;
}

int cmd_verify(const Options& o) {
  const std::vector<int> ids = verify::suite(o.suite);
  const verify::Builders builders = o.canary ? verify::canary_builders() : verify::Builders{};
  Json report;
  report["suite"] = o.suite;
  report["criteria"] = Json::array();
  bool all = true;
  for (int id : ids) {
    const verify::Report r = verify::run(id, builders);
    all = all && r.pass;
    report["criteria"].push_back(verify::to_json(r));
    std::cerr << "criterion " << id << ": " << (r.pass ? "pass" : "FAIL") << '\n';
  }
  report["status"] = all ? "pass" : "fail";
  std::ofstream file;
  output(o, file) << report.dump(2) << '\n';
  return all ? 0 : kExitFail;
}

int cmd_export(const Options& o) {
  const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("data/games") : std::filesystem::path(o.out);
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> builtins = {
      {"g1", "g1"},
      {"g1-tilde", "g1-tilde"},
      {"half-minus:0", "half-minus-0"},
      {"half-plus:0", "half-plus-0"},
      {"tilde-half-minus:0.05", "tilde-half-minus-0.05"},
      {"tilde-half-plus:0.05", "tilde-half-plus-0.05"},
      {"perfect-test", "perfect-test"},
  };
  for (const auto& [name, file] : builtins) {
    const auto path = dir / (file + ".json");
    save_game(resolve_game(name).game, path.string(), name);
    std::cout << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted value solver for zero-sum games with public signals", "sdg"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  Options o;

  auto add_solve_flags = [&](CLI::App* sub) {
    sub->add_option("--game", o.game, "builtin name or game file")->required();
    sub->add_option("--belief", o.beliefs, "state name, weight list, or name=weight pairs")->take_all();
    sub->add_option("--solver", o.solve.solver)->check(CLI::IsMember({"auto", "tree", "grid", "reduced"}));
    sub->add_option("--resolution", o.solve.resolution, "grid resolution (0 = solver default)");
    sub->add_option("--tol", o.solve.tol)->check(CLI::PositiveNumber);
    sub->add_option("--eps", o.solve.eps, "tree truncation target")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed);
    sub->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output file (default stdout)");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one instance, one JSON line per belief");
  add_solve_flags(solve);
  solve->add_option("--lambda", o.lambda)->required();
  solve->add_option("--h", o.h);

  CLI::App* sweep = app.add_subcommand("sweep", "CSV over lambda and h grids");
  add_solve_flags(sweep);
  sweep->add_option("--lambda", o.lambda);
  sweep->add_option("--h", o.h);
  sweep->add_option("--lambda-grid", o.lambda_grid, "start:stop:points (geometric) or comma list");
  sweep->add_option("--h-grid", o.h_grid, "start:stop:points (geometric) or comma list");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the verification battery, JSON report");
  verify_cmd->add_option("suite", o.suite)
      ->check(CLI::IsMember({"all", "limits", "pde", "oscillation", "equivalence", "perfect"}));
  verify_cmd->add_option("--out", o.out);
  verify_cmd->add_option("--seed", o.seed, "accepted for uniformity; the battery uses fixed seeds");
  verify_cmd->add_option("--threads", o.threads);
  verify_cmd->add_flag("--canary", o.canary)->group("");

  CLI::App* export_cmd = app.add_subcommand("export", "write the builtin games as JSON files");
  export_cmd->add_option("--out", o.out, "directory (default data/games)");

  // "--" is a state name of the two-sided example; CLI11 would read a bare
  // "--" as the end of options, so glue it to its flag.
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--belief" && k + 1 < argc && std::string(argv[k + 1]) == "--") {
      args.push_back("--belief=--");
      ++k;
    } else {
      args.push_back(a);
    }
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*sweep) {
      if (o.lambda_grid.empty() && !(o.lambda > 0.0)) fail(ErrorCode::kInvalidArgument, "need --lambda or --lambda-grid");
      return cmd_sweep(o);
    }
    if (*verify_cmd) return cmd_verify(o);
    if (*export_cmd) return cmd_export(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}
