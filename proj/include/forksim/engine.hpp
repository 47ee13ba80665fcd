#pragma once
#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "forksim/fork.hpp"
#include "forksim/prices.hpp"
#include "forksim/risk.hpp"
#include "forksim/scenario.hpp"

// Discrete-event replay of a scenario. Scripted events and hourly
// checkpoints share one timeline; at equal timestamps scripted events run
// first, then agents act in declaration order, then a metrics frame is cut.
// Business-rule rejections of scripted/agent operations are recorded in a
// ledger rather than aborting the run.

namespace forksim {

// arithmetic mean of nonzero supplied balances; synthetic pool accounts excluded
inline i128 mean_position_size(const std::map<std::string, Account>& accounts, const Market& m) {
  i128 sum = 0;
  std::int64_t n = 0;
  for (const auto& [aid, a] : accounts) {
    if (aid.rfind("pool:", 0) == 0) continue;
    i128 bal = m.supplied_balance(a);
    if (bal > 0) { sum += bal; ++n; }
  }
  return n == 0 ? 0 : sum / n;
}

struct MarketFrameRow {
  MarketId market;
  AssetId asset;
  i128 utilization = 0;         // ray
  i128 borrow_rate = 0;         // contract annual, ray
  i128 display_borrow_rate = 0; // per-block rates re-annualized at 6245 blocks/day
  i128 stable_rate = 0;
  i128 avg_stable_rate = 0;
  i128 supply_rate = 0;
  i128 cash = 0;
  i128 total_variable_debt = 0;
  i128 total_stable_debt = 0;
  i128 total_supplied = 0;
  i128 principal_outstanding = 0;
  i128 liquidity_index = 0;
  i128 variable_borrow_index = 0;
  i128 treasury = 0;
  i128 mean_position_size = 0;  // wad, over accounts with a live deposit
  i128 break_even_rate = 0;     // ray; zero once the fork has happened

  friend bool operator==(const MarketFrameRow&, const MarketFrameRow&) = default;
};

struct Frame {
  Timestamp time = 0;
  std::vector<MarketFrameRow> rows;
  std::int64_t liquidations_cum = 0;
  std::int64_t rejections_cum = 0;
  i128 total_debt_value = 0;  // wad value-units
  i128 bad_debt_value = 0;
  i128 ethw_minted = 0;
  i128 arb_pnl_closed = 0;    // realized, wad value-units

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Rejection {
  Timestamp time = 0;
  std::string actor;  // "event#<n>" or "agent:<account>"
  std::string op;
  MarketId market;
  std::string account;
  std::string error;
};

struct LenderSummary {
  std::string account;
  MarketId market;
  AssetId asset;
  i128 deposited = 0;
  i128 withdrawn = 0;
  i128 supplied_final = 0;
  i128 locked_at_fork = 0;   // deposit balance stranded at the fork snapshot
  i128 interest_income = 0;  // withdrawn + supplied_final - deposited
};

struct RunMeta {
  std::string scenario;
  std::uint64_t seed = 0;
  Timestamp start = 0, end = 0;
  std::int64_t interval = 0;
  std::optional<Timestamp> fork_time;
};

struct RunResult {
  RunMeta meta;
  std::vector<Frame> frames;
  std::vector<LiquidationRecord> liquidations;
  std::vector<ArbPosition> arb_positions;
  std::vector<Rejection> rejections;
  std::vector<LenderSummary> summaries;
  ForkState fork_state;
  std::map<std::string, Account> accounts;  // final state
};

class Engine {
 public:
  Engine(ScenarioDoc doc, PriceSeries prices, std::uint64_t seed = 0)
      : doc_(std::move(doc)), series_(std::move(prices)), rng_(seed), seed_(seed) {}

  RunResult run() {
    auto diags = validate(doc_, &series_);
    if (!diags.empty())
      throw SimError(Err::BadScenario, diags.front().code + ": " + diags.front().message);

    for (const auto& p : doc_.markets) {
      pools_[p.protocol].emplace(p.id, Market(p, doc_.start));
      proto_of_[p.id] = p.protocol;
    }
    for (const auto& a : doc_.accounts) {
      Account acc;
      acc.id = a.id;
      acc.wallet = a.wallet;
      accounts_[a.id] = std::move(acc);
    }
    for (const auto& e : doc_.events)
      if (e.kind == EventKind::Fork) {
        fork_spec_ = ForkSpec{e.time, e.asset.empty() ? doc_.native_asset : e.asset,
                              e.forked_asset.empty() ? AssetId("ETHW") : e.forked_asset};
      }
    arbs_.resize(doc_.agents.size());
    loop_done_.assign(doc_.agents.size(), false);

    // merged timeline: scripted events win ties against checkpoints
    struct Item {
      Timestamp time;
      std::int64_t seq;
      int event = -1;  // index into doc_.events, -1 for checkpoint
    };
    std::vector<Item> items;
    for (int i = 0; i < static_cast<int>(doc_.events.size()); ++i)
      items.push_back({doc_.events[i].time, doc_.events[i].seq, i});
    for (Timestamp t = doc_.start; t <= doc_.end; t += doc_.checkpoint_interval)
      items.push_back({t, std::numeric_limits<std::int64_t>::max(), -1});
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      if (a.time != b.time) return a.time < b.time;
      return a.seq < b.seq;
    });

    RunResult out;
    out.meta = RunMeta{doc_.name, seed_, doc_.start, doc_.end, doc_.checkpoint_interval,
                       fork_spec_ ? std::optional<Timestamp>(fork_spec_->fork_time) : std::nullopt};

    for (const auto& item : items) {
      Timestamp t = item.time;
      for (auto& [proto, ms] : pools_)
        for (auto& [id, m] : ms) m.accrue(t);
      refresh_prices(t);
      if (item.event >= 0) {
        dispatch(doc_.events[static_cast<std::size_t>(item.event)], item.event, t);
      } else {
        for (std::size_t gi = 0; gi < doc_.agents.size(); ++gi) run_agent(gi, t);
        out.frames.push_back(cut_frame(t));
      }
    }

    for (std::size_t gi = 0; gi < doc_.agents.size(); ++gi)
      if (arbs_[gi] && arbs_[gi]->borrowed > 0) out.arb_positions.push_back(*arbs_[gi]);
    out.liquidations = liquidations_;
    out.rejections = rejections_;
    out.fork_state = fork_state_;
    out.summaries = summarize();
    out.accounts = accounts_;
    return out;
  }

 private:
  ScenarioDoc doc_;
  PriceSeries series_;
  std::mt19937_64 rng_;
  std::uint64_t seed_;

  std::map<std::string, Markets> pools_;  // protocol -> markets
  std::map<MarketId, std::string> proto_of_;
  std::map<std::string, Account> accounts_;
  PriceMap prices_;
  std::map<AssetId, std::pair<Timestamp, i128>> ticks_;
  std::optional<ForkSpec> fork_spec_;
  ForkState fork_state_;
  std::vector<LiquidationRecord> liquidations_;
  std::vector<Rejection> rejections_;
  std::vector<std::optional<ArbPosition>> arbs_;
  std::vector<char> loop_done_;
  std::map<std::pair<std::string, MarketId>, i128> locked_at_fork_;
  i128 arb_pnl_closed_ = 0;

  Market& market(const MarketId& id) { return pools_.at(proto_of_.at(id)).at(id); }
  Markets& protocol_markets(const MarketId& id) { return pools_.at(proto_of_.at(id)); }
  Account& account(const std::string& id) { return accounts_.at(id); }

  void refresh_prices(Timestamp t) {
    prices_.time = t;
    for (const auto& a : series_.assets()) {
      auto [obs, px] = series_.at_obs(a, t);
      auto tk = ticks_.find(a);
      if (tk != ticks_.end() && tk->second.first >= obs && tk->second.first <= t)
        px = tk->second.second;
      prices_.price[a] = px;
    }
    for (const auto& [a, tp] : ticks_)
      if (!series_.has(a) && tp.first <= t) prices_.price[a] = tp.second;
  }

  HealthGate borrow_gate(const Market& m) {
    return [this, &m](const Account& a, i128 amount) {
      i128 extra = wad_mul(amount, prices_.at(m.asset()));
      auto h = health_factor(a, pools_.at(m.params().protocol), prices_, doc_.configs, extra, 0);
      return h.infinite || h.ray >= RAY;
    };
  }

  HealthGate withdraw_gate(const Market& m) {
    return [this, &m](const Account& a, i128 amount) {
      const Markets& scope = pools_.at(m.params().protocol);
      bool has_debt = false;
      for (const auto& [id, mm] : scope)
        if (mm.debt_of(a) > 0) { has_debt = true; break; }
      if (!has_debt) return true;
      auto cit = doc_.configs.find(m.asset());
      i128 less = 0;
      if (cit != doc_.configs.end() && cit->second.usable_as_collateral)
        less = mul_div_half_up(wad_mul(amount, prices_.at(m.asset())),
                               cit->second.liquidation_threshold, RAY);
      auto h = health_factor(a, scope, prices_, doc_.configs, 0, less);
      return h.infinite || h.ray >= RAY;
    };
  }

  void reject(Timestamp t, std::string actor, std::string op, MarketId mkt, std::string acct,
              const SimError& e) {
    rejections_.push_back(Rejection{t, std::move(actor), std::move(op), std::move(mkt),
                                    std::move(acct), err_name(e.code())});
  }

  void dispatch(const ScenarioEvent& e, int idx, Timestamp t) {
    std::string actor = "event#" + std::to_string(idx);
    try {
      switch (e.kind) {
        case EventKind::Deposit:
          market(e.market).deposit(account(e.account), e.amount, t);
          break;
        case EventKind::Withdraw: {
          Market& m = market(e.market);
          i128 amt = e.amount < 0 ? m.supplied_balance(account(e.account)) : e.amount;
          m.withdraw(account(e.account), amt, t, withdraw_gate(m));
          break;
        }
        case EventKind::Borrow: {
          Market& m = market(e.market);
          m.borrow(account(e.account), e.amount, e.mode, t, borrow_gate(m));
          break;
        }
        case EventKind::Repay: {
          Market& m = market(e.market);
          i128 amt = e.amount < 0 ? m.debt_of(account(e.account)) : e.amount;
          m.repay(account(e.account), amt, e.mode, t);
          break;
        }
        case EventKind::Liquidate: {
          Markets& scope = protocol_markets(e.debt_market);
          i128 req = e.amount > 0 ? e.amount : market(e.debt_market).debt_of(account(e.target));
          liquidations_.push_back(liquidate(scope, account(e.liquidator), account(e.target),
                                            e.debt_market, e.collateral_market, req, prices_,
                                            doc_.configs, t));
          break;
        }
        case EventKind::SetRateModel:
          market(e.market).set_rate_model(*e.model, t);
          if (e.stable_model) market(e.market).set_stable_model(*e.stable_model, t);
          break;
        case EventKind::SetBorrowCap:
          market(e.market).set_borrow_cap(e.cap, t);
          break;
        case EventKind::SetPause:
          market(e.market).set_pause(e.flag, t);
          break;
        case EventKind::RebalanceStable: {
          Market& m = market(e.market);
          if (m.rebalance_stable(account(e.account), t)) recompute_avg_stable(m, t);
          break;
        }
        case EventKind::PriceTick:
          ticks_[e.asset] = {t, e.price};
          refresh_prices(t);
          break;
        case EventKind::Fork:
          do_fork(t);
          break;
        case EventKind::Checkpoint:
          // explicit frame outside the regular grid
          for (std::size_t gi = 0; gi < doc_.agents.size(); ++gi) run_agent(gi, t);
          break;
      }
    } catch (const SimError& err) {
      reject(t, actor, event_kind_name(e.kind), e.market, e.account, err);
    }
  }

  void do_fork(Timestamp t) {
    if (!fork_spec_) throw SimError(Err::BadScenario, "fork event without spec");
    Markets merged;
    for (const auto& [proto, ms] : pools_)
      for (const auto& [id, m] : ms) merged.emplace(id, m);
    fork_state_ = apply_fork(fork_state_, *fork_spec_, accounts_, merged);
    // snapshot deposits stranded through the fork, for income-vs-windfall reporting
    for (const auto& [proto, ms] : pools_)
      for (const auto& [id, m] : ms) {
        if (m.asset() != fork_spec_->parent) continue;
        for (const auto& [aid, a] : accounts_) {
          i128 bal = m.supplied_balance(a);
          if (bal > 0) locked_at_fork_[{aid, id}] = bal;
        }
      }
  }

  // debt-weighted mean of surviving stable positions, applied after a rebalance
  void recompute_avg_stable(Market& m, Timestamp t) {
    i256 num = 0, den = 0;
    for (const auto& [aid, a] : accounts_) {
      i128 d = m.stable_debt_of(a);
      if (d <= 0) continue;
      num += i256(d) * i256(a.stable_debt.at(m.id()).rate);
      den += i256(d);
    }
    m.set_avg_stable_rate(Rate{den == 0 ? i128(0) : i128(num / den)}, t);
  }

  // ---- agents ----

  void run_agent(std::size_t gi, Timestamp t) {
    const AgentSpec& g = doc_.agents[gi];
    switch (g.kind) {
      case AgentKind::Lender: agent_lender(g, t); break;
      case AgentKind::Arbitrageur: agent_arb(gi, g, t); break;
      case AgentKind::Looper: agent_looper(gi, g, t); break;
      case AgentKind::Keeper: agent_keeper(g, t); break;
    }
  }

  void agent_lender(const AgentSpec& g, Timestamp t) {
    Market& m = market(g.market);
    if (m.utilization().ray < g.withdraw_trigger) return;
    Account& a = account(g.account);
    i128 bal = m.supplied_balance(a);
    if (bal <= 0) return;
    try {
      m.withdraw(a, bal, t, withdraw_gate(m));
    } catch (const SimError& e) {
      reject(t, "agent:" + g.account, "withdraw", g.market, g.account, e);
      if (e.code() == Err::InsufficientLiquidity) {
        i128 avail = m.cash() < bal ? m.cash() : bal;
        if (avail > 0) {
          try {
            m.withdraw(a, avail, t, withdraw_gate(m));
          } catch (const SimError& e2) {
            reject(t, "agent:" + g.account, "withdraw", g.market, g.account, e2);
          }
        }
      }
    }
  }

  Rate predicted_display_rate(const Market& m, i128 extra_borrow) const {
    i128 debt = m.total_debt();
    i128 denom = debt + m.cash();
    if (denom <= 0) return Rate{0};
    i128 d2 = debt + extra_borrow;
    if (d2 > denom) d2 = denom;
    Utilization u{mul_div_trunc(d2, RAY, denom)};
    Rate r = borrow_rate(m.params().model, u);
    if (m.params().mode == AccrualMode::PerBlockLinear)
      return annual_to_display_annual(r, m.params().blocks);
    return r;
  }

  void agent_arb(std::size_t gi, const AgentSpec& g, Timestamp t) {
    if (!fork_spec_) return;
    Market& m = market(g.market);
    Account& a = account(g.account);
    auto& pos = arbs_[gi];

    if (fork_state_.applied && t >= fork_spec_->fork_time) {
      if (pos && !pos->close_time && pos->borrowed > 0) {
        i128 debt = m.debt_of(a);
        i128 pay = debt;
        i128 wallet = a.wallet_of(m.asset());
        if (pay > wallet) pay = wallet;
        i128 repaid = 0;
        if (pay > 0) {
          try {
            repaid = m.repay(a, pay, DebtMode::Variable, t);
          } catch (const SimError& e) {
            reject(t, "agent:" + g.account, "repay", g.market, g.account, e);
          }
        }
        pos->interest_paid = repaid > pos->borrowed ? repaid - pos->borrowed : 0;
        // only the ETHW minted against the borrowed holdings counts for the strategy
        i128 ethw = a.wallet_of(fork_spec_->forked);
        pos->ethw_received = ethw < pos->borrowed ? ethw : pos->borrowed;
        pos->close_time = t;
        pos->pnl_value = arb_pnl(*pos, prices_.at(fork_spec_->forked), prices_.at(m.asset()));
        arb_pnl_closed_ += pos->pnl_value;
      }
      return;
    }

    std::int64_t horizon = fork_spec_->fork_time - t;
    if (horizon <= 0) return;
    if (m.params().borrowing_paused) return;
    i128 p_fork = prices_.price.count(fork_spec_->forked) ? prices_.at(fork_spec_->forked) : 0;
    if (p_fork <= 0) return;
    Rate be = break_even_rate(p_fork, prices_.at(m.asset()), TimeToMerge{horizon});

    if (!arb_should_borrow(be, predicted_display_rate(m, 0), g.safety_margin)) return;

    i128 hi = m.cash();
    if (m.params().borrow_cap) {
      i128 room = *m.params().borrow_cap - m.total_debt();
      if (room < hi) hi = room;
    }
    auto v = detail::value_account(a, pools_.at(m.params().protocol), prices_, doc_.configs);
    i128 power_room = v.borrow_power > v.debt
                          ? wad_div(v.borrow_power - v.debt, prices_.at(m.asset()))
                          : 0;
    if (power_room < hi) hi = power_room;
    if (hi < g.min_lot) return;

    // largest x with margin-inflated post-borrow rate still below break-even
    auto ok = [&](i128 x) {
      return arb_should_borrow(be, predicted_display_rate(m, x), g.safety_margin);
    };
    i128 lo = 0;
    if (ok(hi)) {
      lo = hi;
    } else {
      i128 top = hi;
      while (top - lo > i128(1000000000000)) {  // 1e-6 token granularity
        i128 mid = lo + (top - lo) / 2;
        if (ok(mid)) lo = mid;
        else top = mid;
      }
    }
    if (lo < g.min_lot) return;
    try {
      m.borrow(a, lo, DebtMode::Variable, t, borrow_gate(m));
      if (!pos) pos = ArbPosition{g.account, 0, t, std::nullopt, 0, 0, 0};
      pos->borrowed += lo;
    } catch (const SimError& e) {
      reject(t, "agent:" + g.account, "borrow", g.market, g.account, e);
    }
  }

  void agent_looper(std::size_t gi, const AgentSpec& g, Timestamp t) {
    if (loop_done_[gi]) return;
    loop_done_[gi] = true;
    Market& cm = market(g.collateral_market);
    Market& dm = market(g.debt_market);
    Account& a = account(g.account);
    i128 stake = g.loop_initial;
    if (stake > a.wallet_of(cm.asset())) stake = a.wallet_of(cm.asset());
    if (stake <= 0) return;
    try {
      cm.deposit(a, stake, t);
      i128 last = stake;
      for (std::int64_t k = 0; k < g.loop_iterations; ++k) {
        i128 coll_value = wad_mul(last, prices_.at(cm.asset()));
        i128 borrow_amt = wad_div(mul_div_trunc(coll_value, g.loop_ltv, RAY),
                                  prices_.at(dm.asset()));
        if (borrow_amt <= 0) break;
        dm.borrow(a, borrow_amt, DebtMode::Variable, t, borrow_gate(dm));
        // swap the borrowed asset into fresh collateral at spot
        i128 got = mul_div_trunc(borrow_amt, prices_.at(dm.asset()), prices_.at(cm.asset()));
        a.wallet[dm.asset()] -= borrow_amt;
        a.wallet[cm.asset()] += got;
        cm.deposit(a, got, t);
        last = got;
      }
    } catch (const SimError& e) {
      reject(t, "agent:" + g.account, "loop", g.debt_market, g.account, e);
    }
  }

  void agent_keeper(const AgentSpec& g, Timestamp t) {
    Account& keeper = account(g.account);
    for (int iter = 0; iter < 64; ++iter) {
      std::string worst_id, worst_proto;
      i128 worst_hf = 0;
      bool found = false;
      for (const auto& [proto, ms] : pools_) {
        if (!g.protocol.empty() && proto != g.protocol) continue;
        for (const auto& [aid, a] : accounts_) {
          if (aid == g.account || aid.rfind("pool:", 0) == 0) continue;
          auto h = health_factor(a, ms, prices_, doc_.configs);
          if (h.below_one() && (!found || h.ray < worst_hf)) {
            found = true;
            worst_id = aid;
            worst_proto = proto;
            worst_hf = h.ray;
          }
        }
      }
      if (!found) return;
      Markets& ms = pools_.at(worst_proto);
      Account& target = account(worst_id);
      MarketId debt_mkt, coll_mkt;
      i128 best_debt = 0, best_coll = 0;
      for (const auto& [id, m] : ms) {
        i128 dv = wad_mul(m.debt_of(target), prices_.at(m.asset()));
        if (dv > best_debt) { best_debt = dv; debt_mkt = id; }
        i128 cv = wad_mul(m.supplied_balance(target), prices_.at(m.asset()));
        if (cv > best_coll) { best_coll = cv; coll_mkt = id; }
      }
      if (debt_mkt.empty() || coll_mkt.empty()) return;
      try {
        liquidations_.push_back(liquidate(ms, keeper, target, debt_mkt, coll_mkt,
                                          ms.at(debt_mkt).debt_of(target), prices_,
                                          doc_.configs, t));
      } catch (const SimError& e) {
        reject(t, "agent:" + g.account, "liquidate", debt_mkt, worst_id, e);
        return;
      }
    }
  }

  // ---- frames & summaries ----

  Frame cut_frame(Timestamp t) {
    Frame f;
    f.time = t;
    f.liquidations_cum = static_cast<std::int64_t>(liquidations_.size());
    f.rejections_cum = static_cast<std::int64_t>(rejections_.size());
    f.ethw_minted = fork_state_.minted_total;
    f.arb_pnl_closed = arb_pnl_closed_;
    for (const auto& [proto, ms] : pools_) {
      auto rep = bad_debt(accounts_, ms, prices_, doc_.configs);
      f.total_debt_value += rep.total_debt_value;
      f.bad_debt_value += rep.bad_debt_value;
    }
    for (auto& [proto, ms] : pools_)
      for (auto& [id, m] : ms) {
        MarketFrameRow r;
        r.market = id;
        r.asset = m.asset();
        r.utilization = m.utilization().ray;
        r.borrow_rate = m.borrow_rate_now().ray;
        r.display_borrow_rate = m.display_borrow_rate().ray;
        r.stable_rate = m.params().stable_model ? m.stable_borrow_rate_now().ray : 0;
        r.avg_stable_rate = m.avg_stable_rate().ray;
        r.supply_rate = m.supply_rate_now().ray;
        r.cash = m.cash();
        r.total_variable_debt = m.total_variable_debt();
        r.total_stable_debt = m.total_stable_debt();
        r.total_supplied = m.total_supplied();
        r.principal_outstanding = m.principal_outstanding();
        r.liquidity_index = m.liquidity_index();
        r.variable_borrow_index = m.variable_borrow_index();
        r.treasury = m.treasury();
        r.mean_position_size = mean_position_size(accounts_, m);
        if (fork_spec_ && !fork_state_.applied && t < fork_spec_->fork_time &&
            m.asset() == fork_spec_->parent && prices_.price.count(fork_spec_->forked)) {
          r.break_even_rate = break_even_rate(prices_.at(fork_spec_->forked),
                                              prices_.at(m.asset()),
                                              TimeToMerge{fork_spec_->fork_time - t})
                                  .ray;
        }
        f.rows.push_back(std::move(r));
      }
    std::sort(f.rows.begin(), f.rows.end(),
              [](const MarketFrameRow& a, const MarketFrameRow& b) { return a.market < b.market; });
    return f;
  }

  std::vector<LenderSummary> summarize() {
    std::vector<LenderSummary> out;
    for (const auto& [aid, a] : accounts_) {
      if (aid.rfind("pool:", 0) == 0) continue;
      std::map<MarketId, bool> touched;
      for (const auto& [mid, _] : a.deposited_total) touched[mid] = true;
      for (const auto& [mid, _] : a.scaled_collateral) touched[mid] = true;
      for (const auto& [mid, _] : touched) {
        const Market& m = market(mid);
        LenderSummary s;
        s.account = aid;
        s.market = mid;
        s.asset = m.asset();
        auto get = [](const std::map<MarketId, i128>& mm, const MarketId& k) {
          auto it = mm.find(k);
          return it == mm.end() ? i128(0) : it->second;
        };
        s.deposited = get(a.deposited_total, mid);
        s.withdrawn = get(a.withdrawn_total, mid);
        s.supplied_final = m.supplied_balance(a);
        auto lk = locked_at_fork_.find({aid, mid});
        s.locked_at_fork = lk == locked_at_fork_.end() ? 0 : lk->second;
        s.interest_income = s.withdrawn + s.supplied_final - s.deposited;
        if (s.deposited == 0 && s.supplied_final == 0) continue;
        out.push_back(std::move(s));
      }
    }
    return out;
  }
};

inline RunResult run_scenario(const ScenarioDoc& doc, const PriceSeries& prices,
                              std::uint64_t seed = 0) {
  return Engine(doc, prices, seed).run();
}

}  // namespace forksim
