#pragma once
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forksim/errors.hpp"
#include "forksim/fixed.hpp"
#include "forksim/fork.hpp"
#include "forksim/market.hpp"
#include "forksim/prices.hpp"
#include "forksim/risk.hpp"

// Scenario scripts: markets, collateral configs, accounts, agents and a
// timestamped event list, loaded from JSON. Amounts are decimal token
// strings (attounit precision), rates/fractions decimal ray strings.

namespace forksim {

enum class EventKind {
  Deposit,
  Withdraw,
  Borrow,
  Repay,
  Liquidate,
  SetRateModel,
  SetBorrowCap,
  SetPause,
  RebalanceStable,
  PriceTick,
  Fork,
  Checkpoint,
};

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Deposit: return "deposit";
    case EventKind::Withdraw: return "withdraw";
    case EventKind::Borrow: return "borrow";
    case EventKind::Repay: return "repay";
    case EventKind::Liquidate: return "liquidate";
    case EventKind::SetRateModel: return "set_rate_model";
    case EventKind::SetBorrowCap: return "set_borrow_cap";
    case EventKind::SetPause: return "set_pause";
    case EventKind::RebalanceStable: return "rebalance_stable";
    case EventKind::PriceTick: return "price_tick";
    case EventKind::Fork: return "fork";
    case EventKind::Checkpoint: return "checkpoint";
  }
  return "?";
}

struct ScenarioEvent {
  Timestamp time = 0;
  std::int64_t seq = 0;  // input order; ties execute in sequence order
  EventKind kind = EventKind::Checkpoint;

  std::string account;
  MarketId market;
  std::string liquidator, target;
  MarketId debt_market, collateral_market;
  i128 amount = 0;
  DebtMode mode = DebtMode::Variable;
  std::optional<RateModel> model;
  std::optional<RateModel> stable_model;
  std::optional<i128> cap;
  bool flag = false;  // pause on/off
  AssetId asset, forked_asset;
  i128 price = 0;
};

enum class AgentKind { Arbitrageur, Lender, Looper, Keeper };

struct AgentSpec {
  AgentKind kind = AgentKind::Lender;
  std::string account;
  MarketId market;             // lender / arbitrageur debt market
  MarketId collateral_market;  // looper
  MarketId debt_market;        // looper
  std::string protocol;        // keeper scope
  i128 safety_margin = 10 * RAY;
  i128 withdraw_trigger = mul_div_trunc(9 * RAY, 1, 10);  // 0.9
  i128 loop_ltv = 0;
  std::int64_t loop_iterations = 0;
  i128 loop_initial = 0;
  Rate staking_apr{};
  i128 min_lot = WAD;  // smallest borrow worth transacting
};

struct AccountSpec {
  std::string id;
  std::map<AssetId, i128> wallet;
};

struct ScenarioDoc {
  std::string name;
  Timestamp start = 0;
  Timestamp end = 0;
  std::int64_t checkpoint_interval = 3600;
  AssetId native_asset = "ETH";
  std::vector<Market::Params> markets;
  CollateralConfigs configs;
  std::vector<AccountSpec> accounts;
  std::vector<AgentSpec> agents;
  std::vector<ScenarioEvent> events;
};

// ---- JSON loading ----

namespace detail {

inline RateModel parse_rate_model(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "aave_kinked") {
    return AaveKinked{parse_ray(j.at("r0").get<std::string>()),
                      parse_ray(j.at("slope1").get<std::string>()),
                      parse_ray(j.at("slope2").get<std::string>()),
                      parse_ray(j.at("u_optimal").get<std::string>())};
  }
  if (type == "compound_linear") {
    return CompoundLinear{parse_ray(j.at("r0").get<std::string>()),
                          parse_ray(j.at("slope").get<std::string>())};
  }
  if (type == "compound_jump") {
    return CompoundJump{parse_ray(j.at("r0").get<std::string>()),
                        parse_ray(j.at("slope1").get<std::string>()),
                        parse_ray(j.at("slope2").get<std::string>()),
                        parse_ray(j.at("kink").get<std::string>())};
  }
  throw SimError(Err::BadModelSpec, type);
}

inline DebtMode parse_mode(const nlohmann::json& j) {
  std::string m = j.value("mode", "variable");
  if (m == "variable") return DebtMode::Variable;
  if (m == "stable") return DebtMode::Stable;
  throw SimError(Err::BadScenario, "bad debt mode: " + m);
}

}  // namespace detail

inline ScenarioDoc load_scenario(const nlohmann::json& j) {
  ScenarioDoc doc;
  doc.name = j.value("name", "scenario");
  doc.start = j.at("start").get<Timestamp>();
  doc.end = j.at("end").get<Timestamp>();
  doc.checkpoint_interval = j.value("checkpoint_interval", std::int64_t{3600});
  doc.native_asset = j.value("native_asset", std::string("ETH"));

  for (const auto& mj : j.at("markets")) {
    Market::Params p;
    p.id = mj.at("id").get<std::string>();
    p.asset = mj.at("asset").get<std::string>();
    p.protocol = mj.at("protocol").get<std::string>();
    std::string accrual = mj.value("accrual", "per_second_compound");
    if (accrual == "per_second_compound") p.mode = AccrualMode::PerSecondCompound;
    else if (accrual == "per_block_linear") p.mode = AccrualMode::PerBlockLinear;
    else throw SimError(Err::BadScenario, "bad accrual mode: " + accrual);
    p.model = detail::parse_rate_model(mj.at("rate_model"));
    if (mj.contains("stable_rate_model") && !mj.at("stable_rate_model").is_null())
      p.stable_model = detail::parse_rate_model(mj.at("stable_rate_model"));
    p.reserve_factor = ReserveFactor{parse_ray(mj.value("reserve_factor", "0"))};
    if (mj.contains("borrow_cap") && !mj.at("borrow_cap").is_null())
      p.borrow_cap = parse_wad(mj.at("borrow_cap").get<std::string>());
    p.borrowing_paused = mj.value("paused", false);
    p.stable_enabled = mj.value("stable_enabled", false);
    p.avg_block_time_ms = mj.value("avg_block_time_ms", std::int64_t{13830});
    doc.markets.push_back(std::move(p));
  }

  for (const auto& cj : j.at("collateral_configs")) {
    CollateralConfig c;
    c.asset = cj.at("asset").get<std::string>();
    c.ltv = parse_ray(cj.at("ltv").get<std::string>());
    c.liquidation_threshold = parse_ray(cj.at("liquidation_threshold").get<std::string>());
    c.liquidation_bonus = parse_ray(cj.value("liquidation_bonus", "0.05"));
    c.close_factor = parse_ray(cj.value("close_factor", "0.5"));
    c.usable_as_collateral = cj.value("usable_as_collateral", true);
    doc.configs[c.asset] = c;
  }

  if (j.contains("accounts")) {
    for (const auto& aj : j.at("accounts")) {
      AccountSpec a;
      a.id = aj.at("id").get<std::string>();
      if (aj.contains("wallet"))
        for (const auto& [asset, amt] : aj.at("wallet").items())
          a.wallet[asset] = parse_wad(amt.get<std::string>());
      doc.accounts.push_back(std::move(a));
    }
  }

  if (j.contains("agents")) {
    for (const auto& gj : j.at("agents")) {
      AgentSpec g;
      std::string kind = gj.at("kind").get<std::string>();
      if (kind == "arbitrageur") g.kind = AgentKind::Arbitrageur;
      else if (kind == "lender") g.kind = AgentKind::Lender;
      else if (kind == "looper") g.kind = AgentKind::Looper;
      else if (kind == "keeper") g.kind = AgentKind::Keeper;
      else throw SimError(Err::BadScenario, "bad agent kind: " + kind);
      g.account = gj.at("account").get<std::string>();
      g.market = gj.value("market", "");
      g.collateral_market = gj.value("collateral_market", "");
      g.debt_market = gj.value("debt_market", "");
      g.protocol = gj.value("protocol", "");
      if (gj.contains("safety_margin")) g.safety_margin = parse_ray(gj.at("safety_margin"));
      if (gj.contains("withdraw_trigger_utilization"))
        g.withdraw_trigger = parse_ray(gj.at("withdraw_trigger_utilization"));
      if (gj.contains("ltv")) g.loop_ltv = parse_ray(gj.at("ltv"));
      g.loop_iterations = gj.value("iterations", std::int64_t{0});
      if (gj.contains("initial")) g.loop_initial = parse_wad(gj.at("initial"));
      if (gj.contains("staking_apr")) g.staking_apr = Rate{parse_ray(gj.at("staking_apr"))};
      if (gj.contains("min_lot")) g.min_lot = parse_wad(gj.at("min_lot"));
      doc.agents.push_back(std::move(g));
    }
  }

  std::int64_t seq = 0;
  for (const auto& ej : j.at("events")) {
    ScenarioEvent e;
    e.time = ej.at("time").get<Timestamp>();
    e.seq = seq++;
    std::string kind = ej.at("kind").get<std::string>();
    if (kind == "deposit") e.kind = EventKind::Deposit;
    else if (kind == "withdraw") e.kind = EventKind::Withdraw;
    else if (kind == "borrow") e.kind = EventKind::Borrow;
    else if (kind == "repay") e.kind = EventKind::Repay;
    else if (kind == "liquidate") e.kind = EventKind::Liquidate;
    else if (kind == "set_rate_model") e.kind = EventKind::SetRateModel;
    else if (kind == "set_borrow_cap") e.kind = EventKind::SetBorrowCap;
    else if (kind == "set_pause") e.kind = EventKind::SetPause;
    else if (kind == "rebalance_stable") e.kind = EventKind::RebalanceStable;
    else if (kind == "price_tick") e.kind = EventKind::PriceTick;
    else if (kind == "fork") e.kind = EventKind::Fork;
    else if (kind == "checkpoint") e.kind = EventKind::Checkpoint;
    else throw SimError(Err::BadScenario, "bad event kind: " + kind);

    e.account = ej.value("account", "");
    e.market = ej.value("market", "");
    e.liquidator = ej.value("liquidator", "");
    e.target = ej.value("target", "");
    e.debt_market = ej.value("debt_market", "");
    e.collateral_market = ej.value("collateral_market", "");
    if (ej.contains("amount")) {
      std::string amt = ej.at("amount").get<std::string>();
      e.amount = amt == "all" ? i128(-1) : parse_wad(amt);  // -1: full balance / full debt
    }
    if (ej.contains("mode")) e.mode = detail::parse_mode(ej);
    if (ej.contains("model")) e.model = detail::parse_rate_model(ej.at("model"));
    if (ej.contains("stable_model")) e.stable_model = detail::parse_rate_model(ej.at("stable_model"));
    if (ej.contains("cap") && !ej.at("cap").is_null())
      e.cap = parse_wad(ej.at("cap").get<std::string>());
    e.flag = ej.value("paused", false);
    e.asset = ej.value("asset", "");
    e.forked_asset = ej.value("forked", "");
    if (ej.contains("price")) e.price = parse_wad(ej.at("price").get<std::string>());
    doc.events.push_back(std::move(e));
  }
  std::stable_sort(doc.events.begin(), doc.events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.time < b.time; });
  return doc;
}

inline ScenarioDoc load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError(Err::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw SimError(Err::BadScenario, std::string("json parse: ") + e.what());
  }
  return load_scenario(j);
}

// ---- validation ----

struct Diagnostic {
  std::string code;
  std::string message;
  int event_index = -1;
};

inline std::vector<Diagnostic> validate(const ScenarioDoc& doc,
                                        const PriceSeries* prices = nullptr) {
  std::vector<Diagnostic> out;
  auto flag = [&](std::string code, std::string msg, int idx = -1) {
    out.push_back(Diagnostic{std::move(code), std::move(msg), idx});
  };

  if (doc.start >= doc.end) flag("BadHorizon", "start must precede end");
  if (doc.checkpoint_interval <= 0) flag("BadInterval", "checkpoint interval must be positive");

  std::map<MarketId, const Market::Params*> mkts;
  std::map<std::string, bool> accts;
  for (const auto& m : doc.markets) {
    if (mkts.count(m.id)) flag("DuplicateMarket", m.id);
    mkts[m.id] = &m;
    if (m.reserve_factor.ray < 0 || m.reserve_factor.ray > RAY)
      flag("BadReserveFactor", m.id);
    if (const auto* k = std::get_if<AaveKinked>(&m.model)) {
      if (k->u_optimal <= 0 || k->u_optimal >= RAY) flag("BadModelParam", m.id + ": u_optimal");
      if (k->r0 < 0 || k->slope1 < 0 || k->slope2 < 0) flag("BadModelParam", m.id);
    } else if (const auto* c = std::get_if<CompoundLinear>(&m.model)) {
      if (c->r0 < 0 || c->slope < 0) flag("BadModelParam", m.id);
    } else if (const auto* jm = std::get_if<CompoundJump>(&m.model)) {
      if (jm->kink <= 0 || jm->kink >= RAY) flag("BadModelParam", m.id + ": kink");
      if (jm->r0 < 0 || jm->slope1 < 0 || jm->slope2 < 0) flag("BadModelParam", m.id);
    }
    if (!doc.configs.count(m.asset)) flag("MissingCollateralConfig", m.asset);
  }
  for (const auto& a : doc.accounts) {
    if (accts.count(a.id)) flag("DuplicateAccount", a.id);
    accts[a.id] = true;
  }
  for (const auto& [asset, c] : doc.configs) {
    if (!(c.ltv > 0 && c.ltv <= c.liquidation_threshold && c.liquidation_threshold < RAY))
      flag("BadCollateralConfig", asset + ": need 0 < ltv <= threshold < 1");
    if (c.liquidation_bonus < 0 || c.liquidation_bonus > RAY / 2)
      flag("BadCollateralConfig", asset + ": bonus out of [0,0.5]");
    if (c.close_factor <= 0 || c.close_factor > RAY)
      flag("BadCollateralConfig", asset + ": close factor out of (0,1]");
  }
  for (const auto& g : doc.agents) {
    if (!accts.count(g.account)) flag("UnknownAccount", "agent account " + g.account);
    auto check_mkt = [&](const MarketId& id, const char* what) {
      if (!id.empty() && !mkts.count(id)) flag("UnknownMarket", std::string(what) + " " + id);
    };
    check_mkt(g.market, "agent market");
    check_mkt(g.collateral_market, "agent collateral market");
    check_mkt(g.debt_market, "agent debt market");
    if (g.kind == AgentKind::Looper && (g.loop_ltv <= 0 || g.loop_ltv >= RAY))
      flag("BadAgentParam", g.account + ": loop ltv");
  }

  int forks = 0;
  int idx = 0;
  for (const auto& e : doc.events) {
    auto need_account = [&] {
      if (!accts.count(e.account)) flag("UnknownAccount", e.account, idx);
    };
    auto need_market = [&](const MarketId& id) {
      if (!mkts.count(id)) flag("UnknownMarket", id, idx);
    };
    if (e.time < doc.start || e.time > doc.end) flag("EventOutsideHorizon", "", idx);
    switch (e.kind) {
      case EventKind::Deposit:
      case EventKind::Withdraw:
      case EventKind::Borrow:
      case EventKind::Repay:
        need_account();
        need_market(e.market);
        if (e.amount <= 0) {
          bool all_ok = e.amount == -1 &&
                        (e.kind == EventKind::Withdraw || e.kind == EventKind::Repay);
          if (!all_ok) flag("NonPositiveAmount", "", idx);
        }
        break;
      case EventKind::Liquidate:
        if (!accts.count(e.liquidator)) flag("UnknownAccount", e.liquidator, idx);
        if (!accts.count(e.target)) flag("UnknownAccount", e.target, idx);
        need_market(e.debt_market);
        need_market(e.collateral_market);
        break;
      case EventKind::SetRateModel:
        need_market(e.market);
        if (!e.model) flag("MissingModel", "", idx);
        break;
      case EventKind::SetBorrowCap:
      case EventKind::SetPause:
        need_market(e.market);
        break;
      case EventKind::RebalanceStable:
        need_account();
        need_market(e.market);
        break;
      case EventKind::PriceTick:
        if (e.asset.empty() || e.price <= 0) flag("BadPriceTick", "", idx);
        break;
      case EventKind::Fork:
        ++forks;
        if (forks > 1) flag("DuplicateFork", "", idx);
        break;
      case EventKind::Checkpoint:
        break;
    }
    ++idx;
  }

  if (prices) {
    std::vector<AssetId> need;
    for (const auto& m : doc.markets) need.push_back(m.asset);
    for (const auto& e : doc.events)
      if (e.kind == EventKind::Fork && !e.forked_asset.empty()) need.push_back(e.forked_asset);
    for (const auto& a : need) {
      if (!prices->has(a)) {
        flag("MissingPriceSeries", a);
      } else if (prices->first_time(a) > doc.start) {
        flag("PriceCoverage", a + " starts after scenario start");
      }
    }
  }
  return out;
}

}  // namespace forksim
