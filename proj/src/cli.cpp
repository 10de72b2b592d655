#include "fate421/cli.hpp"

#include "fate421/advice.hpp"
#include "fate421/bench.hpp"
#include "fate421/detail/parallel.hpp"
#include "fate421/errors.hpp"
#include "fate421/http_api.hpp"
#include "fate421/workbench.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace fate421 {

namespace {

struct Options {
  int dice = 3;
  int faces = 6;
  int casts = 3;
  std::string player = "first";
  std::optional<int> imposed;
  std::string utility = "goal:123";
  std::string policy;
  int digits = 5;
  unsigned threads = detail::default_threads();
  std::uint64_t seed = 421;
  std::optional<std::uint64_t> samples;
  std::string out;
  std::string format;
  bool diagnostic = false;
  std::string host = "127.0.0.1";
  int port = 8421;
  std::string snapshot;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

RoundConfig round_of(const Options& o) {
  const Player player = parse_player(o.player);
  if (player == Player::first && o.imposed && *o.imposed != o.casts)
    throw UsageError("--imposed applies to next players only");
  RoundConfig round = player == Player::first ? RoundConfig::first(o.dice, o.faces, o.casts)
                                              : RoundConfig::next(o.dice, o.faces, o.casts, o.imposed.value_or(o.casts));
  round.validate();
  return round;
}

void allow_formats(const Options& o, std::initializer_list<std::string_view> formats) {
  if (o.format.empty()) return;
  for (auto f : formats)
    if (o.format == f) return;
  throw UsageError("--format " + o.format + " does not apply to this command");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InvalidConfig("cannot write '" + path + "'");
  f << text;
}

int cmd_solve(const Options& o, std::ostream& out) {
  allow_formats(o, {"text", "json"});
  Workbench bench(o.threads);
  const RoundConfig round = round_of(o);
  const UtilitySpec utility = parse_utility(o.utility, o.faces);
  const auto solved = bench.solve(round, utility);
  const Rational& v = solved->root_value();
  if (o.format == "json") {
    out << nlohmann::json{{"round", round.describe()}, {"utility", o.utility}, {"value", value_json(v, o.digits)}}.dump(2)
        << "\n";
  } else {
    out << "round    " << round.describe() << "\n"
        << "utility  " << o.utility << "\n"
        << "value    " << to_decimal(v, o.digits) << "\n"
        << "exact    " << to_string(v) << "\n";
  }
  if (!o.out.empty()) write_file(o.out, extract_pure_strategy(*solved).to_json().dump(1) + "\n");
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  allow_formats(o, {"text", "json"});
  Workbench bench(o.threads);
  const RoundConfig round = round_of(o);
  const UtilitySpec utility = parse_utility(o.utility, o.faces);
  const auto report =
      evaluate_policy(bench, PolicySpec::parse(o.policy, round), utility, o.utility, round, o.samples.value_or(0), o.seed);
  const auto j = report.to_json(o.digits);
  if (o.format == "text") {
    out << "policy        " << report.policy << "\n"
        << "utility       " << report.utility << "\n"
        << "round         " << report.round.describe() << "\n"
        << "value         " << j.at("decimal").get<std::string>() << " (" << j.at("exact").get<std::string>() << ")\n"
        << "ratio         " << (report.ratio ? to_decimal(*report.ratio, o.digits) : std::string("-")) << "\n"
        << "conservation  " << j.at("conservation").get<std::string>() << "\n";
    if (report.mc)
      out << "mc            " << report.mc->mean << " +- " << report.mc->standard_error << " (" << report.mc->samples
          << " samples, seed " << report.mc->seed << ")\n";
  } else {
    out << j.dump(2) << "\n";
  }
  if (!o.out.empty()) write_file(o.out, j.dump(2) + "\n");
  return report.conservation.passed() ? 0 : 1;
}

int cmd_tables(const Options& o, std::ostream& out) {
  allow_formats(o, {"json", "csv"});
  const RoundConfig round = round_of(o);
  const auto table = ResultProbabilityTable::compile(round.player, o.dice, o.faces, o.casts, o.diagnostic, o.threads);
  std::optional<ResultProbabilityTable> companion;
  if (round.player == Player::next && o.dice <= o.faces)
    companion = ResultProbabilityTable::compile(Player::first, o.dice, o.faces, o.casts, false, o.threads);
  else if (round.player == Player::first)
    companion = ResultProbabilityTable::compile(Player::next, o.dice, o.faces, o.casts, false, o.threads);
  const auto report = verify_properties(table, companion ? &*companion : nullptr);
  if (o.format == "csv" && o.out.empty()) {
    out << table.chart_csv(o.digits);
    return report.passed() ? 0 : 1;
  }
  out << "table " << to_string(round.player) << " (D,F,J)=(" << o.dice << "," << o.faces << "," << o.casts << ")"
      << (o.diagnostic ? " diagnostic" : "") << ", " << table.cells().size() << " cells\n";
  for (const auto& c : report.checks)
    out << (c.passed ? "pass  " : "FAIL  ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  if (!o.out.empty()) {
    if (o.format == "csv") write_file(o.out, table.chart_csv(o.digits));
    else table.save(o.out);
    out << "written " << o.out << "\n";
  }
  return report.passed() ? 0 : 1;
}

int cmd_bench(const Options& o, std::ostream& out) {
  allow_formats(o, {"text", "json"});
  Workbench bench(o.threads);
  const auto tables = run_bench(bench, o.dice, o.faces, o.casts);
  const std::string text = o.format == "json" ? bench_json(tables, o.digits).dump(2) + "\n" : format_bench(tables, o.digits);
  out << text;
  if (!o.out.empty()) write_file(o.out, text);
  return 0;
}

int cmd_mc(const Options& o, std::ostream& out) {
  allow_formats(o, {"text", "json"});
  Workbench bench(o.threads);
  const RoundConfig round = round_of(o);
  const UtilitySpec utility = parse_utility(o.utility, o.faces);
  const PolicySpec policy = PolicySpec::parse(o.policy, round);
  const Strategy strategy = bench.strategy(policy, utility, round);
  const Rational exact = kolmogorov_expectation(strategy, utility, *bench.graph(round));
  const auto mc = monte_carlo(strategy, utility, round, o.samples.value_or(100000), o.seed, o.threads);
  const double deviation = std::abs(mc.mean - to_double(exact));
  const bool within = deviation <= 4 * mc.standard_error;
  if (o.format == "json") {
    out << nlohmann::json{{"policy", o.policy},
                          {"utility", o.utility},
                          {"exact", value_json(exact, o.digits)},
                          {"mc", {{"mean", mc.mean}, {"stderr", mc.standard_error}, {"samples", mc.samples}, {"seed", mc.seed}}},
                          {"within_4_stderr", within}}
               .dump(2)
        << "\n";
  } else {
    out.precision(17);
    out << "policy    " << o.policy << "\n"
        << "utility   " << o.utility << "\n"
        << "exact     " << to_decimal(exact, o.digits) << " (" << to_string(exact) << ")\n"
        << "mean      " << mc.mean << "\n"
        << "stderr    " << mc.standard_error << "\n"
        << "samples   " << mc.samples << ", seed " << mc.seed << "\n"
        << "deviation " << deviation << (within ? " (within 4 stderr)" : " (beyond 4 stderr)") << "\n";
  }
  return 0;
}

nlohmann::json utility_arg(const std::string& text) {
  if (text.rfind("file:", 0) == 0) {
    std::ifstream f(text.substr(5));
    if (!f) throw InvalidConfig("cannot read utility file '" + text.substr(5) + "'");
    return nlohmann::json::parse(f);
  }
  return text;
}

int cmd_advise(const Options& o, std::istream& in, std::ostream& out) {
  const RoundConfig round = round_of(o);
  auto bench = std::make_shared<Workbench>(o.threads);
  advise_terminal(bench, round, o.policy.empty() ? "goalid:h1s1" : o.policy, utility_arg(o.utility), in, out, o.digits);
  return 0;
}

int cmd_serve(const Options& o, std::ostream& out) {
  auto bench = std::make_shared<Workbench>(o.threads);
  std::optional<std::filesystem::path> snapshot;
  if (!o.snapshot.empty()) snapshot = o.snapshot;
  auto store = std::make_shared<SessionStore>(bench, o.digits, snapshot);
  out << "serving on http://" << o.host << ":" << o.port << "\n" << std::flush;
  serve(store, o.host, o.port);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact solver, policy evaluator and advisor for the 421 dice round", "fate421"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--dice,-D", o.dice, "dice per round")->capture_default_str();
  app.add_option("--faces,-F", o.faces, "faces per die")->capture_default_str();
  app.add_option("--casts,-J", o.casts, "casts per round")->capture_default_str();
  app.add_option("--player", o.player, "first or next")->check(CLI::IsMember({"first", "next"}))->capture_default_str();
  app.add_option("--imposed", o.imposed, "duration J1 imposed on a next player (default J)");
  app.add_option("--utility,-u", o.utility, "goal:G, goals:G+H, transfer, sumfaces or file:PATH")->capture_default_str();
  app.add_option("--digits", o.digits, "decimal digits")->check(CLI::Range(0, 60))->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--out,-o", o.out, "output file");

  auto* solve = app.add_subcommand("solve", "optimal value by backward induction; --out dumps the strategy");
  auto* eval = app.add_subcommand("eval", "exact evaluation report of a policy");
  auto* tables = app.add_subcommand("tables", "compile, verify and export the result probability table");
  auto* bench = app.add_subcommand("bench", "benchmark of the goal-identification policies");
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate of a policy against its exact value");
  auto* advise = app.add_subcommand("advise", "interactive advisor on the terminal");
  auto* serve_cmd = app.add_subcommand("serve", "HTTP advice API");

  for (auto* sub : {eval, mc})
    sub->add_option("--policy,-p", o.policy, "optimal, ratchet:G, bernoulli:G, goalid:hXsY[:rev]")->required();
  advise->add_option("--policy,-p", o.policy, "policy giving the advice (default goalid:h1s1)");
  for (auto* sub : {eval, mc}) {
    sub->add_option("--samples", o.samples, "Monte Carlo samples");
    sub->add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
  }
  tables->add_flag("--diagnostic", o.diagnostic, "fill the cells dilemmas leave undefined (non-canonical)");
  serve_cmd->add_option("--host", o.host)->capture_default_str();
  serve_cmd->add_option("--port", o.port)->check(CLI::Range(1, 65535))->capture_default_str();
  serve_cmd->add_option("--snapshot", o.snapshot, "session snapshot file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*eval) return cmd_eval(o, out);
    if (*tables) return cmd_tables(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*mc) return cmd_mc(o, out);
    if (*advise) return cmd_advise(o, in, out);
    if (*serve_cmd) return cmd_serve(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const InvalidConfig& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Unsupported& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidCombination& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fate421
