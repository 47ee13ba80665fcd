#pragma once
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "forksim/engine.hpp"

// Serialization of run results. metrics.csv has one row per checkpoint per
// market; all fixed-point columns are exact decimal strings, so re-parsing
// the file reproduces the in-memory frames bit for bit.

namespace forksim {

inline const char* kMetricsHeader =
    "timestamp,market,asset,utilization,borrow_rate,display_borrow_rate,stable_rate,"
    "avg_stable_rate,supply_rate,cash,total_variable_debt,total_stable_debt,total_supplied,"
    "principal_outstanding,liquidity_index,variable_borrow_index,treasury,mean_position_size,"
    "break_even_rate,liquidations_cum,rejections_cum,total_debt_value,bad_debt_value,"
    "ethw_minted,arb_pnl_closed";

inline void write_metrics_csv(std::ostream& os, const std::vector<Frame>& frames) {
  os << kMetricsHeader << "\n";
  for (const auto& f : frames)
    for (const auto& r : f.rows) {
      os << f.time << ',' << r.market << ',' << r.asset << ','
         << format_fixed(r.utilization, 27) << ',' << format_fixed(r.borrow_rate, 27) << ','
         << format_fixed(r.display_borrow_rate, 27) << ',' << format_fixed(r.stable_rate, 27)
         << ',' << format_fixed(r.avg_stable_rate, 27) << ',' << format_fixed(r.supply_rate, 27)
         << ',' << format_fixed(r.cash, 18) << ',' << format_fixed(r.total_variable_debt, 18)
         << ',' << format_fixed(r.total_stable_debt, 18) << ','
         << format_fixed(r.total_supplied, 18) << ','
         << format_fixed(r.principal_outstanding, 18) << ','
         << format_fixed(r.liquidity_index, 27) << ','
         << format_fixed(r.variable_borrow_index, 27) << ',' << format_fixed(r.treasury, 18)
         << ',' << format_fixed(r.mean_position_size, 18) << ','
         << format_fixed(r.break_even_rate, 27) << ',' << f.liquidations_cum << ','
         << f.rejections_cum << ',' << format_fixed(f.total_debt_value, 18) << ','
         << format_fixed(f.bad_debt_value, 18) << ',' << format_fixed(f.ethw_minted, 18) << ','
         << format_fixed(f.arb_pnl_closed, 18) << "\n";
    }
}

inline std::vector<Frame> read_metrics_csv(std::istream& is) {
  std::vector<Frame> frames;
  std::string line;
  if (!std::getline(is, line)) throw SimError(Err::MalformedRow, "empty metrics file");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) c.push_back(tok);
    if (c.size() != 25) throw SimError(Err::MalformedRow, "line " + std::to_string(lineno));
    Timestamp t = std::stoll(c[0]);
    if (frames.empty() || frames.back().time != t) {
      Frame f;
      f.time = t;
      f.liquidations_cum = std::stoll(c[19]);
      f.rejections_cum = std::stoll(c[20]);
      f.total_debt_value = parse_wad(c[21]);
      f.bad_debt_value = parse_wad(c[22]);
      f.ethw_minted = parse_wad(c[23]);
      f.arb_pnl_closed = parse_wad(c[24]);
      frames.push_back(std::move(f));
    }
    MarketFrameRow r;
    r.market = c[1];
    r.asset = c[2];
    r.utilization = parse_ray(c[3]);
    r.borrow_rate = parse_ray(c[4]);
    r.display_borrow_rate = parse_ray(c[5]);
    r.stable_rate = parse_ray(c[6]);
    r.avg_stable_rate = parse_ray(c[7]);
    r.supply_rate = parse_ray(c[8]);
    r.cash = parse_wad(c[9]);
    r.total_variable_debt = parse_wad(c[10]);
    r.total_stable_debt = parse_wad(c[11]);
    r.total_supplied = parse_wad(c[12]);
    r.principal_outstanding = parse_wad(c[13]);
    r.liquidity_index = parse_ray(c[14]);
    r.variable_borrow_index = parse_ray(c[15]);
    r.treasury = parse_wad(c[16]);
    r.mean_position_size = parse_wad(c[17]);
    r.break_even_rate = parse_ray(c[18]);
    frames.back().rows.push_back(std::move(r));
  }
  return frames;
}

inline nlohmann::json frames_to_json(const std::vector<Frame>& frames) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : frames) {
    nlohmann::json fj;
    fj["timestamp"] = f.time;
    fj["liquidations_cum"] = f.liquidations_cum;
    fj["rejections_cum"] = f.rejections_cum;
    fj["total_debt_value"] = format_fixed(f.total_debt_value, 18);
    fj["bad_debt_value"] = format_fixed(f.bad_debt_value, 18);
    fj["ethw_minted"] = format_fixed(f.ethw_minted, 18);
    fj["arb_pnl_closed"] = format_fixed(f.arb_pnl_closed, 18);
    fj["markets"] = nlohmann::json::array();
    for (const auto& r : f.rows) {
      nlohmann::json rj;
      rj["market"] = r.market;
      rj["asset"] = r.asset;
      rj["utilization"] = format_fixed(r.utilization, 27);
      rj["borrow_rate"] = format_fixed(r.borrow_rate, 27);
      rj["display_borrow_rate"] = format_fixed(r.display_borrow_rate, 27);
      rj["stable_rate"] = format_fixed(r.stable_rate, 27);
      rj["avg_stable_rate"] = format_fixed(r.avg_stable_rate, 27);
      rj["supply_rate"] = format_fixed(r.supply_rate, 27);
      rj["cash"] = format_fixed(r.cash, 18);
      rj["total_variable_debt"] = format_fixed(r.total_variable_debt, 18);
      rj["total_stable_debt"] = format_fixed(r.total_stable_debt, 18);
      rj["total_supplied"] = format_fixed(r.total_supplied, 18);
      rj["principal_outstanding"] = format_fixed(r.principal_outstanding, 18);
      rj["liquidity_index"] = format_fixed(r.liquidity_index, 27);
      rj["variable_borrow_index"] = format_fixed(r.variable_borrow_index, 27);
      rj["treasury"] = format_fixed(r.treasury, 18);
      rj["mean_position_size"] = format_fixed(r.mean_position_size, 18);
      rj["break_even_rate"] = format_fixed(r.break_even_rate, 27);
      fj["markets"].push_back(std::move(rj));
    }
    out.push_back(std::move(fj));
  }
  return out;
}

inline void write_liquidations_csv(std::ostream& os, const std::vector<LiquidationRecord>& v) {
  os << "timestamp,liquidator,target,debt_asset,collateral_asset,repaid,seized\n";
  for (const auto& r : v)
    os << r.time << ',' << r.liquidator << ',' << r.target << ',' << r.debt_asset << ','
       << r.collateral_asset << ',' << format_fixed(r.repaid, 18) << ','
       << format_fixed(r.seized, 18) << "\n";
}

inline void write_arbs_csv(std::ostream& os, const std::vector<ArbPosition>& v) {
  os << "account,borrowed,open_time,close_time,interest_paid,ethw_received,pnl_value\n";
  for (const auto& p : v)
    os << p.account << ',' << format_fixed(p.borrowed, 18) << ',' << p.open_time << ','
       << (p.close_time ? std::to_string(*p.close_time) : "") << ','
       << format_fixed(p.interest_paid, 18) << ',' << format_fixed(p.ethw_received, 18) << ','
       << format_fixed(p.pnl_value, 18) << "\n";
}

inline void write_rejections_csv(std::ostream& os, const std::vector<Rejection>& v) {
  os << "timestamp,actor,op,market,account,error\n";
  for (const auto& r : v)
    os << r.time << ',' << r.actor << ',' << r.op << ',' << r.market << ',' << r.account << ','
       << r.error << "\n";
}

inline void write_accounts_csv(std::ostream& os, const std::vector<LenderSummary>& v) {
  os << "account,market,asset,deposited,withdrawn,supplied_final,locked_at_fork,"
        "interest_income\n";
  for (const auto& s : v)
    os << s.account << ',' << s.market << ',' << s.asset << ',' << format_fixed(s.deposited, 18)
       << ',' << format_fixed(s.withdrawn, 18) << ',' << format_fixed(s.supplied_final, 18)
       << ',' << format_fixed(s.locked_at_fork, 18) << ','
       << format_fixed(s.interest_income, 18) << "\n";
}

inline nlohmann::json meta_to_json(const RunResult& res) {
  nlohmann::json mj;
  mj["scenario"] = res.meta.scenario;
  mj["seed"] = res.meta.seed;
  mj["rng"] = "mt19937_64";
  mj["start"] = res.meta.start;
  mj["end"] = res.meta.end;
  mj["checkpoint_interval"] = res.meta.interval;
  if (res.meta.fork_time) mj["fork_time"] = *res.meta.fork_time;
  mj["frames"] = res.frames.size();
  mj["liquidations"] = res.liquidations.size();
  mj["rejections"] = res.rejections.size();
  mj["ethw_minted"] = format_fixed(res.fork_state.minted_total, 18);
  mj["ethw_minted_to_pools"] = format_fixed(res.fork_state.minted_to_pools, 18);
  return mj;
}

inline void write_outputs(const RunResult& res, const std::string& out_dir,
                          const std::string& format = "csv") {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw SimError(Err::Io, "cannot create " + out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(out_dir) / name);
    if (!f) throw SimError(Err::Io, "cannot write " + name);
    return f;
  };
  if (format == "json") {
    auto f = open("metrics.json");
    f << frames_to_json(res.frames).dump(2) << "\n";
  } else if (format == "csv") {
    auto f = open("metrics.csv");
    write_metrics_csv(f, res.frames);
  } else {
    throw SimError(Err::BadScenario, "unknown output format: " + format);
  }
  { auto f = open("liquidations.csv"); write_liquidations_csv(f, res.liquidations); }
  { auto f = open("arb_positions.csv"); write_arbs_csv(f, res.arb_positions); }
  { auto f = open("rejections.csv"); write_rejections_csv(f, res.rejections); }
  { auto f = open("accounts.csv"); write_accounts_csv(f, res.summaries); }
  { auto f = open("meta.json"); f << meta_to_json(res).dump(2) << "\n"; }
}

}  // namespace forksim
