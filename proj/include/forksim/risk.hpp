#pragma once
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "forksim/errors.hpp"
#include "forksim/fixed.hpp"
#include "forksim/market.hpp"

// Health factors, liquidation eligibility/execution and bad-debt measurement.

namespace forksim {

struct CollateralConfig {
  AssetId asset;
  i128 ltv = 0;                    // ray, max borrow power per unit collateral
  i128 liquidation_threshold = 0;  // ray, weight in the health-factor numerator
  i128 liquidation_bonus = 0;      // ray, liquidator discount
  i128 close_factor = 0;           // ray, max debt share one liquidation may cover
  bool usable_as_collateral = true;
};

using CollateralConfigs = std::map<AssetId, CollateralConfig>;

struct HealthFactor {
  bool infinite = false;  // zero-debt accounts
  i128 ray = 0;

  bool below_one() const { return !infinite && ray < RAY; }
};

struct PriceMap {
  std::map<AssetId, i128> price;  // wad value-units per token
  Timestamp time = 0;

  i128 at(const AssetId& a) const {
    auto it = price.find(a);
    if (it == price.end()) throw SimError(Err::MissingPrice, a);
    return it->second;
  }
};

namespace detail {

inline i128 ray_mul_value(const i128& wad_value, const i128& ray_weight) {
  return mul_div_half_up(wad_value, ray_weight, RAY);
}

// Collateral/debt valuation of one account across the given markets,
// wad value-units. Numerator may be threshold-weighted or raw.
struct AccountValue {
  i128 collateral_raw = 0;
  i128 collateral_weighted = 0;
  i128 borrow_power = 0;  // ltv-weighted
  i128 debt = 0;
};

inline AccountValue value_account(const Account& a, const Markets& markets, const PriceMap& prices,
                                  const CollateralConfigs& configs) {
  AccountValue v;
  for (const auto& [mid, m] : markets) {
    i128 coll = m.supplied_balance(a);
    i128 debt = m.debt_of(a);
    if (coll == 0 && debt == 0) continue;
    i128 px = prices.at(m.asset());
    auto cit = configs.find(m.asset());
    if (cit == configs.end()) throw SimError(Err::MissingPrice, "no collateral config: " + m.asset());
    const CollateralConfig& cfg = cit->second;
    if (coll > 0) {
      i128 val = wad_mul(coll, px);
      v.collateral_raw += val;
      if (cfg.usable_as_collateral) {
        v.collateral_weighted += ray_mul_value(val, cfg.liquidation_threshold);
        v.borrow_power += ray_mul_value(val, cfg.ltv);
      }
    }
    if (debt > 0) v.debt += wad_mul(debt, px);
  }
  return v;
}

}  // namespace detail

// H = sum(C_i * p_i * l_i) / sum(D_i * p_i); infinite when debt is zero.
// `extra_debt_value` / `less_collateral_value` let callers evaluate a
// hypothetical post-operation position.
inline HealthFactor health_factor(const Account& a, const Markets& markets, const PriceMap& prices,
                                  const CollateralConfigs& configs, i128 extra_debt_value = 0,
                                  i128 less_collateral_value = 0) {
  auto v = detail::value_account(a, markets, prices, configs);
  i128 num = v.collateral_weighted - less_collateral_value;
  if (num < 0) num = 0;
  i128 den = v.debt + extra_debt_value;
  if (den == 0) return HealthFactor{true, 0};
  return HealthFactor{false, mul_div_half_up(num, RAY, den)};
}

inline bool is_liquidatable(const Account& a, const Markets& markets, const PriceMap& prices,
                            const CollateralConfigs& configs) {
  return health_factor(a, markets, prices, configs).below_one();
}

struct LiquidationRecord {
  Timestamp time = 0;
  std::string liquidator;
  std::string target;
  AssetId debt_asset;
  AssetId collateral_asset;
  i128 repaid = 0;  // wad of debt asset
  i128 seized = 0;  // wad of collateral asset
};

// Repays up to close_factor of the target's debt in `debt_market` and seizes
// collateral worth repay*(1+bonus) from `collateral_market`.
inline LiquidationRecord liquidate(Markets& markets, Account& liquidator, Account& target,
                                   const MarketId& debt_market, const MarketId& collateral_market,
                                   i128 repay_request, const PriceMap& prices,
                                   const CollateralConfigs& configs, Timestamp now) {
  if (!is_liquidatable(target, markets, prices, configs))
    throw SimError(Err::NotLiquidatable, target.id);
  Market& dm = markets.at(debt_market);
  Market& cm = markets.at(collateral_market);
  auto cit = target.scaled_collateral.find(collateral_market);
  if (cit == target.scaled_collateral.end() || cit->second == 0)
    throw SimError(Err::NoSuchCollateral, target.id);

  const CollateralConfig& coll_cfg = configs.at(cm.asset());
  dm.accrue(now);
  cm.accrue(now);
  i128 debt = dm.debt_of(target);
  if (debt == 0) throw SimError(Err::NoDebt, target.id);
  i128 max_repay = ray_mul(debt, coll_cfg.close_factor);
  i128 repay = repay_request < max_repay ? repay_request : max_repay;
  if (repay <= 0) throw SimError(Err::ZeroAmount, "liquidation repay");
  if (liquidator.wallet_of(dm.asset()) < repay)
    throw SimError(Err::InsufficientWallet, liquidator.id);

  i128 repaid = dm.repay_on_behalf(liquidator, target, repay, now);
  i128 repay_value = wad_mul(repaid, prices.at(dm.asset()));
  i128 bonus_value = mul_div_half_up(repay_value, RAY + coll_cfg.liquidation_bonus, RAY);
  i128 seize_amount = wad_div(bonus_value, prices.at(cm.asset()));
  i128 seized = cm.seize_collateral(target, liquidator, seize_amount, now);

  return LiquidationRecord{now,       liquidator.id, target.id, dm.asset(),
                           cm.asset(), repaid,        seized};
}

struct BadDebtReport {
  i128 total_debt_value = 0;
  i128 bad_debt_value = 0;  // sum over accounts of max(0, debt - raw collateral)
};

inline BadDebtReport bad_debt(const std::map<std::string, Account>& accounts,
                              const Markets& markets, const PriceMap& prices,
                              const CollateralConfigs& configs) {
  BadDebtReport rep;
  for (const auto& [id, a] : accounts) {
    auto v = detail::value_account(a, markets, prices, configs);
    rep.total_debt_value += v.debt;
    if (v.debt > v.collateral_raw) rep.bad_debt_value += v.debt - v.collateral_raw;
  }
  return rep;
}

struct CensusBucket {
  Timestamp start = 0;
  std::int64_t total = 0;
  std::int64_t native_debt = 0;  // liquidations whose covered debt is the native asset
};

inline std::vector<CensusBucket> liquidation_census(const std::vector<LiquidationRecord>& records,
                                                    Timestamp origin, std::int64_t window_seconds,
                                                    std::int64_t n_windows,
                                                    const AssetId& native = "ETH") {
  std::vector<CensusBucket> buckets;
  buckets.reserve(static_cast<std::size_t>(n_windows));
  for (std::int64_t k = 0; k < n_windows; ++k)
    buckets.push_back(CensusBucket{origin + k * window_seconds, 0, 0});
  for (const auto& r : records) {
    std::int64_t k = (r.time - origin) / window_seconds;
    if (r.time < origin || k >= n_windows) continue;
    auto& b = buckets[static_cast<std::size_t>(k)];
    ++b.total;
    if (r.debt_asset == native) ++b.native_debt;
  }
  return buckets;
}

}  // namespace forksim
