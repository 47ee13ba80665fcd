// forksim: deterministic lending-market simulator around a hard fork.
//
//   forksim run --scenario s.json --prices p.csv [--out DIR] [--seed N]
//               [--interval S] [--format csv|json] [--jobs N]
//   forksim validate --scenario s.json [--prices p.csv]
//   forksim rates --model NAME --params k=v,... [--grid N | --points u1,u2,...]
//   forksim breakeven --p-ethw X --p-eth Y --horizon-seconds S
//
// Exit codes: 0 ok, 2 validation error, 3 runtime error, 4 I/O error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "forksim/engine.hpp"
#include "forksim/output.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

using namespace forksim;

int classify(const SimError& e) {
  switch (e.code()) {
    case Err::Io:
      return kExitIo;
    case Err::BadScenario:
    case Err::BadModelSpec:
    case Err::MalformedRow:
    case Err::UnsortedTimestamps:
    case Err::EmptySeries:
    case Err::ZeroEthPrice:
    case Err::NonPositiveHorizon:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

std::map<std::string, std::string> parse_kv(const std::string& s) {
  std::map<std::string, std::string> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw SimError(Err::BadModelSpec, "expected k=v: " + item);
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

RateModel model_from_flags(const std::string& name, const std::string& params) {
  auto kv = parse_kv(params);
  auto get = [&](const char* k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw SimError(Err::BadModelSpec, std::string("missing param ") + k);
    return parse_ray(it->second);
  };
  if (name == "aave_kinked")
    return AaveKinked{get("r0"), get("slope1"), get("slope2"), get("u_optimal")};
  if (name == "compound_linear") return CompoundLinear{get("r0"), get("slope")};
  if (name == "compound_jump")
    return CompoundJump{get("r0"), get("slope1"), get("slope2"), get("kink")};
  throw SimError(Err::BadModelSpec, name);
}

int cmd_run(const std::string& scenario_path, const std::string& prices_path, std::string out_dir,
            std::uint64_t seed, std::int64_t interval, const std::string& format) {
  if (const char* env = std::getenv("FORKSIM_OUT")) out_dir = env;
  ScenarioDoc doc = load_scenario_file(scenario_path);
  PriceSeries prices = ingest_prices(prices_path);
  if (interval > 0) doc.checkpoint_interval = interval;
  auto diags = validate(doc, &prices);
  if (!diags.empty()) {
    for (const auto& d : diags) {
      std::cerr << "validation: " << d.code;
      if (d.event_index >= 0) std::cerr << " (event " << d.event_index << ")";
      if (!d.message.empty()) std::cerr << ": " << d.message;
      std::cerr << "\n";
    }
    return kExitValidation;
  }
  RunResult res = run_scenario(doc, prices, seed);
  write_outputs(res, out_dir, format);
  std::cout << "wrote " << res.frames.size() << " frames to " << out_dir << "\n";
  return 0;
}

int cmd_validate(const std::string& scenario_path, const std::string& prices_path) {
  ScenarioDoc doc = load_scenario_file(scenario_path);
  std::vector<Diagnostic> diags;
  if (!prices_path.empty()) {
    PriceSeries prices = ingest_prices(prices_path);
    diags = validate(doc, &prices);
  } else {
    diags = validate(doc);
  }
  if (diags.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& d : diags) {
    std::cout << d.code;
    if (d.event_index >= 0) std::cout << " (event " << d.event_index << ")";
    if (!d.message.empty()) std::cout << ": " << d.message;
    std::cout << "\n";
  }
  return kExitValidation;
}

int cmd_rates(const std::string& name, const std::string& params, int grid,
              const std::string& points) {
  RateModel model = model_from_flags(name, params);
  std::vector<i128> us;
  if (!points.empty()) {
    std::istringstream ss(points);
    std::string tok;
    while (std::getline(ss, tok, ',')) us.push_back(parse_ray(tok));
  } else if (grid > 0) {
    for (int i = 0; i <= grid; ++i) us.push_back(mul_div_trunc(RAY, i, grid));
  }
  std::cout << "utilization,rate\n";
  for (i128 u : us)
    std::cout << format_fixed(u, 27) << ',' << format_fixed(borrow_rate(model, Utilization{u}).ray, 27)
              << "\n";
  return 0;
}

int cmd_breakeven(const std::string& p_ethw, const std::string& p_eth, std::int64_t horizon) {
  Rate be = break_even_rate(parse_wad(p_ethw), parse_wad(p_eth), TimeToMerge{horizon});
  std::cout << format_fixed(be.ray, 27) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic lending-market / hard-fork simulator"};
  app.require_subcommand(1);

  std::string scenario, prices, out_dir = "out", format = "csv";
  std::uint64_t seed = 0;
  std::int64_t interval = 0;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "replay a scenario and emit metrics");
  run->add_option("--scenario", scenario)->required();
  run->add_option("--prices", prices)->required();
  run->add_option("--out", out_dir);
  run->add_option("--seed", seed);
  run->add_option("--interval", interval);
  run->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--jobs", jobs);  // reserved for multi-scenario batches

  auto* val = app.add_subcommand("validate", "check a scenario file");
  val->add_option("--scenario", scenario)->required();
  val->add_option("--prices", prices);

  std::string model_name, model_params, grid_points;
  int grid = 20;
  auto* rates = app.add_subcommand("rates", "print a rate-curve table");
  rates->add_option("--model", model_name)->required();
  rates->add_option("--params", model_params)->required();
  rates->add_option("--grid", grid);
  rates->add_option("--points", grid_points);

  std::string p_ethw, p_eth;
  std::int64_t horizon = 0;
  auto* be = app.add_subcommand("breakeven", "break-even borrow rate before a fork");
  be->add_option("--p-ethw", p_ethw)->required();
  be->add_option("--p-eth", p_eth)->required();
  be->add_option("--horizon-seconds", horizon)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario, prices, out_dir, seed, interval, format);
    if (val->parsed()) return cmd_validate(scenario, prices);
    if (rates->parsed()) return cmd_rates(model_name, model_params, grid, grid_points);
    if (be->parsed()) return cmd_breakeven(p_ethw, p_eth, horizon);
  } catch (const forksim::SimError& e) {
    std::cerr << "error: " << forksim::err_name(e.code()) << ": " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
