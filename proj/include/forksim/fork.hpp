#pragma once
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forksim/errors.hpp"
#include "forksim/fixed.hpp"
#include "forksim/market.hpp"

// Hard-fork semantics (snapshot minting of the forked token), break-even
// borrow-rate math, arbitrage decision/PnL accounting, cumulative borrowing
// cost and the stETH leverage loop.

namespace forksim {

using bf50 = boost::multiprecision::cpp_bin_float_50;

struct ForkSpec {
  Timestamp fork_time = 0;
  AssetId parent = "ETH";
  AssetId forked = "ETHW";
};

struct ForkState {
  bool applied = false;
  i128 minted_total = 0;       // wad of forked asset
  i128 minted_to_pools = 0;    // stranded with the pool contracts
  Timestamp applied_at = 0;
};

struct TimeToMerge {
  std::int64_t delta_merge = 0;                      // seconds until the fork
  std::int64_t delta_year = kSecondsPerYear;
};

// (1 + p_ethw/p_eth)^(delta_year/delta_merge) - 1, evaluated in 50-digit
// floats and rounded to ray.
inline Rate break_even_rate(i128 p_ethw, i128 p_eth, TimeToMerge t) {
  if (p_eth <= 0) throw SimError(Err::ZeroEthPrice);
  if (t.delta_merge <= 0) throw SimError(Err::NonPositiveHorizon);
  if (p_ethw < 0) p_ethw = 0;
  if (p_ethw == 0) return Rate{0};
  bf50 ratio = bf50(p_ethw.str()) / bf50(p_eth.str());
  bf50 expo = bf50(t.delta_year) / bf50(t.delta_merge);
  bf50 be = boost::multiprecision::pow(bf50(1) + ratio, expo) - 1;
  bf50 scaled = be * bf50(RAY.str()) + bf50(0.5);
  return Rate{i128(scaled.convert_to<boost::multiprecision::int256_t>())};
}

// Wallet balances mint one-to-one; pooled lender deposits mint nothing to
// the lenders; each pool's cash is credited to a synthetic pool-contract
// account (stranded, since post-fork repayment never happens).
inline ForkState apply_fork(ForkState state, const ForkSpec& spec,
                            std::map<std::string, Account>& accounts, const Markets& markets) {
  if (state.applied) throw SimError(Err::AlreadyForked);
  if (spec.parent == spec.forked) throw SimError(Err::BadScenario, "parent == forked");
  for (auto& [id, a] : accounts) {
    i128 bal = a.wallet_of(spec.parent);
    if (bal > 0) {
      a.wallet[spec.forked] += bal;
      state.minted_total += bal;
    }
  }
  for (const auto& [mid, m] : markets) {
    if (m.asset() != spec.parent) continue;
    i128 cash = m.pool_cash_snapshot();
    if (cash > 0) {
      Account& pool = accounts["pool:" + mid];
      if (pool.id.empty()) pool.id = "pool:" + mid;
      pool.wallet[spec.forked] += cash;
      state.minted_total += cash;
      state.minted_to_pools += cash;
    }
  }
  state.applied = true;
  state.applied_at = spec.fork_time;
  return state;
}

// Borrow only while the (margin-inflated) rate stays strictly below break-even.
inline bool arb_should_borrow(Rate break_even, Rate borrow, i128 safety_margin_ray) {
  return mul_div_half_up(borrow.ray, safety_margin_ray, RAY) < break_even.ray;
}

// Step series of annualized rates; lookups are last-observation-carried-forward.
using RateSeries = std::vector<std::pair<Timestamp, Rate>>;

// Integrates the accrual index over [open, close] under the market's accrual
// convention and returns index(close)/index(open) - 1 as a ray fraction.
inline i128 cumulative_borrow_cost(const RateSeries& series, Timestamp open, Timestamp close,
                                   AccrualMode mode, std::int64_t avg_block_time_ms = 13830,
                                   const BlockConvention& blocks = {}) {
  if (series.empty()) throw SimError(Err::SeriesGap, "empty rate series");
  if (open >= close) throw SimError(Err::NonPositiveHorizon, "open >= close");
  if (open < series.front().first) throw SimError(Err::SeriesGap, "series starts after open");
  for (std::size_t i = 1; i < series.size(); ++i)
    if (series[i].first < series[i - 1].first)
      throw SimError(Err::UnsortedTimestamps, "rate series");

  i128 index = RAY;
  Timestamp t = open;
  std::size_t i = 0;
  while (i + 1 < series.size() && series[i + 1].first <= open) ++i;
  while (t < close) {
    Timestamp seg_end = close;
    if (i + 1 < series.size() && series[i + 1].first < close) seg_end = series[i + 1].first;
    Rate r = series[i].second;
    if (mode == AccrualMode::PerBlockLinear) {
      std::int64_t db = (seg_end - t) * 1000 / avg_block_time_ms;
      index = ray_mul(index, linear_index_factor(r, db, blocks));
    } else {
      index = ray_mul(index, compound_index_factor(r, seg_end - t));
    }
    t = seg_end;
    ++i;
  }
  return index - RAY;
}

struct ArbPosition {
  std::string account;
  i128 borrowed = 0;       // wad of parent asset, principal
  Timestamp open_time = 0;
  std::optional<Timestamp> close_time;
  i128 interest_paid = 0;  // wad of parent asset
  i128 ethw_received = 0;  // wad of forked asset
  i128 pnl_value = 0;      // signed wad value-units
};

// pnl = ethw * p_ethw_at_sale - interest * p_eth, in wad value-units.
inline i128 arb_pnl(const ArbPosition& pos, i128 p_ethw_at_sale, i128 p_eth) {
  if (!pos.close_time) throw SimError(Err::PositionOpen, pos.account);
  return wad_mul(pos.ethw_received, p_ethw_at_sale) - wad_mul(pos.interest_paid, p_eth);
}

struct LoopResult {
  i128 exposure = 0;  // wad
  i128 debt = 0;      // wad
};

// Recursive collateral loop: exposure = initial * sum ltv^k for k=0..n;
// the open-ended loop converges to initial/(1-ltv).
inline LoopResult steth_loop(i128 initial, i128 ltv_ray, std::optional<std::int64_t> iterations) {
  if (ltv_ray <= 0 || ltv_ray >= RAY) throw SimError(Err::InvalidLtv);
  if (initial < 0) throw SimError(Err::ZeroAmount, "negative initial");
  LoopResult out;
  if (!iterations) {
    out.exposure = ray_div(initial, RAY - ltv_ray);
  } else {
    i128 term = initial;
    out.exposure = initial;
    for (std::int64_t k = 0; k < *iterations; ++k) {
      term = ray_mul(term, ltv_ray);
      out.exposure += term;
    }
  }
  out.debt = out.exposure - initial;
  return out;
}

// Net APR on the initial stake: (staking*exposure - borrow*debt)/initial.
inline Rate loop_carry(Rate staking_apr, Rate borrow_rate, i128 exposure, i128 debt,
                       i128 initial) {
  if (initial <= 0) throw SimError(Err::ZeroAmount, "loop_carry initial");
  i256 num = i256(staking_apr.ray) * i256(exposure) - i256(borrow_rate.ray) * i256(debt);
  return Rate{i128(num / i256(initial))};
}

}  // namespace forksim
