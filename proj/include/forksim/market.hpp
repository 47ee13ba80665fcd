#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "forksim/errors.hpp"
#include "forksim/fixed.hpp"
#include "forksim/rates.hpp"

// Per-asset lending pool: deposits, withdrawals, variable/stable borrowing,
// index-based interest accrual, treasury accrual, borrow caps and pausing.
//
// Accrual model: markets accrue lazily against a rate epoch. Rates are
// frozen at the last state-changing operation (mirroring on-chain behavior,
// where curves re-price only on interactions); all views between operations
// are derived from the epoch base, so observing a market never perturbs it.

namespace forksim {

using AssetId = std::string;
using MarketId = std::string;

enum class AccrualMode { PerSecondCompound, PerBlockLinear };
enum class DebtMode { Variable, Stable };

struct Amount {
  i128 wad = 0;  // token attounits, non-negative
  friend auto operator<=>(const Amount&, const Amount&) = default;
};

struct StablePosition {
  i128 principal = 0;   // wad, as of `since`
  i128 rate = 0;        // ray, the user's locked stable rate
  Timestamp since = 0;
};

struct Account {
  std::string id;
  std::map<AssetId, i128> wallet;                    // unlocked balances, fork-eligible
  std::map<MarketId, i128> scaled_collateral;        // supplied, scaled by liquidity index
  std::map<MarketId, i128> scaled_variable_debt;
  std::map<MarketId, StablePosition> stable_debt;
  // flow ledger, used for interest-income reporting
  std::map<MarketId, i128> deposited_total;
  std::map<MarketId, i128> withdrawn_total;

  i128 wallet_of(const AssetId& a) const {
    auto it = wallet.find(a);
    return it == wallet.end() ? i128(0) : it->second;
  }
};

// Returns true when the account stays healthy after the proposed change.
// The engine wires this to the risk module; unit tests may pass nullptr.
using HealthGate = std::function<bool(const Account&, i128 amount_wad)>;

class Market {
 public:
  struct Params {
    MarketId id;
    AssetId asset;
    std::string protocol;  // markets of one protocol share collateral
    AccrualMode mode = AccrualMode::PerSecondCompound;
    RateModel model = CompoundLinear{};
    std::optional<RateModel> stable_model;  // stable-rate curve, AAVE only
    ReserveFactor reserve_factor{};
    std::optional<i128> borrow_cap;  // wad; flow constraint on new principal
    bool borrowing_paused = false;
    bool stable_enabled = false;
    std::int64_t avg_block_time_ms = 13830;  // ~86400/6245
    BlockConvention blocks{};
  };

  Market(Params p, Timestamp t0) : p_(std::move(p)), last_accrual_(t0), epoch_time_(t0) {
    epoch_var_rate_ = borrow_rate(p_.model, Utilization{0});
  }

  const Params& params() const { return p_; }
  const MarketId& id() const { return p_.id; }
  const AssetId& asset() const { return p_.asset; }
  Timestamp last_accrual_time() const { return last_accrual_; }

  // ---- views (evaluated at last_accrual_time) ----

  i128 cash() const { return cash_; }

  i128 variable_borrow_index() const {
    return ray_mul(epoch_var_index_, growth_factor(epoch_var_rate_, last_accrual_));
  }

  i128 total_variable_debt() const { return ray_mul(scaled_var_debt_, variable_borrow_index()); }

  i128 total_stable_debt() const {
    return ray_mul(epoch_stable_debt_,
                   compound_index_factor(Rate{avg_stable_rate_}, last_accrual_ - epoch_time_));
  }

  i128 total_debt() const { return total_variable_debt() + total_stable_debt(); }

  // Suppliers receive (1-R) of accrued borrow interest via the liquidity index.
  i128 liquidity_index() const {
    i128 interest = total_debt() - epoch_debt_;
    if (interest <= 0 || epoch_supplied_ <= 0) return epoch_liq_index_;
    i128 to_suppliers = ray_mul(interest, RAY - p_.reserve_factor.ray);
    i128 growth = mul_div_trunc(to_suppliers, RAY, epoch_supplied_);
    return ray_mul(epoch_liq_index_, RAY + growth);
  }

  i128 total_supplied() const { return ray_mul(scaled_supply_, liquidity_index()); }

  // Treasury takes the residual between borrower interest and supplier
  // interest, which keeps cash + debt = supplied + treasury tight.
  i128 treasury() const {
    i128 delta = (total_debt() - epoch_debt_) - (total_supplied() - epoch_supplied_);
    if (delta < 0) delta = 0;
    return treasury_ + delta;
  }

  Utilization utilization() const {
    i128 debt = total_debt();
    if (debt == 0) return Utilization{0};
    return Utilization{mul_div_trunc(debt, RAY, cash_ + debt)};
  }

  Rate borrow_rate_now() const { return borrow_rate(p_.model, utilization()); }

  Rate stable_borrow_rate_now() const {
    if (!p_.stable_model) throw SimError(Err::StableDisabled, p_.id);
    return borrow_rate(*p_.stable_model, utilization());
  }

  Rate avg_stable_rate() const { return Rate{avg_stable_rate_}; }

  Rate supply_rate_now() const {
    Utilization u = utilization();
    ReserveFactor r = p_.reserve_factor;
    if (p_.mode == AccrualMode::PerBlockLinear) {
      return compound_supply_rate(borrow_rate_now(), u, r);
    }
    i128 var = total_variable_debt();
    i128 stab = total_stable_debt();
    i128 tot = var + stab;
    if (tot == 0) return Rate{0};
    i128 stable_share = ray_div(stab, tot);
    return aave_supply_rate(u, stable_share, Rate{avg_stable_rate_}, RAY - stable_share,
                            borrow_rate_now(), r);
  }

  // Annualized rate in the display convention (re-annualized per block for
  // Compound-style markets; identity for per-second markets).
  Rate display_borrow_rate() const {
    Rate r = borrow_rate_now();
    if (p_.mode == AccrualMode::PerBlockLinear) return annual_to_display_annual(r, p_.blocks);
    return r;
  }

  i128 principal_outstanding() const { return principal_outstanding_; }

  i128 supplied_balance(const Account& a) const {
    auto it = a.scaled_collateral.find(p_.id);
    if (it == a.scaled_collateral.end()) return 0;
    return ray_mul(it->second, liquidity_index());
  }

  i128 variable_debt_of(const Account& a) const {
    auto it = a.scaled_variable_debt.find(p_.id);
    if (it == a.scaled_variable_debt.end()) return 0;
    return ray_mul(it->second, variable_borrow_index());
  }

  i128 stable_debt_of(const Account& a) const {
    auto it = a.stable_debt.find(p_.id);
    if (it == a.stable_debt.end()) return 0;
    return ray_mul(it->second.principal,
                   compound_index_factor(Rate{it->second.rate}, last_accrual_ - it->second.since));
  }

  i128 debt_of(const Account& a) const { return variable_debt_of(a) + stable_debt_of(a); }

  // |cash + debt - supplied - treasury|, for conservation checks.
  i128 conservation_gap() const {
    i128 g = cash_ + total_debt() - total_supplied() - treasury();
    return g < 0 ? -g : g;
  }

  // ---- operations ----

  void accrue(Timestamp now) {
    if (now < last_accrual_) throw SimError(Err::ClockRegression, p_.id);
    last_accrual_ = now;
  }

  void deposit(Account& a, i128 amount, Timestamp now) {
    settle(now);
    if (amount <= 0) throw SimError(Err::ZeroAmount, "deposit");
    if (a.wallet_of(p_.asset) < amount) throw SimError(Err::InsufficientWallet, a.id);
    a.wallet[p_.asset] -= amount;
    cash_ += amount;
    i128 scaled = mul_div_trunc(amount, RAY, epoch_liq_index_);
    scaled_supply_ += scaled;
    a.scaled_collateral[p_.id] += scaled;
    a.deposited_total[p_.id] += amount;
    finish_op();
  }

  void withdraw(Account& a, i128 amount, Timestamp now, const HealthGate& gate = nullptr) {
    settle(now);
    if (amount <= 0) throw SimError(Err::ZeroAmount, "withdraw");
    i128 bal = supplied_balance(a);
    if (amount > bal) throw SimError(Err::InsufficientBalance, a.id);
    if (amount > cash_) throw SimError(Err::InsufficientLiquidity, p_.id);
    if (gate && !gate(a, amount)) throw SimError(Err::WouldBeUnhealthy, a.id);
    i128& scaled = a.scaled_collateral[p_.id];
    i128 delta = mul_div_ceil(amount, RAY, epoch_liq_index_);
    if (delta > scaled) delta = scaled;
    scaled -= delta;
    scaled_supply_ -= delta;
    cash_ -= amount;
    a.wallet[p_.asset] += amount;
    a.withdrawn_total[p_.id] += amount;
    finish_op();
  }

  void borrow(Account& a, i128 amount, DebtMode mode, Timestamp now,
              const HealthGate& gate = nullptr) {
    settle(now);
    if (amount <= 0) throw SimError(Err::ZeroAmount, "borrow");
    if (p_.borrowing_paused) throw SimError(Err::BorrowingPaused, p_.id);
    if (mode == DebtMode::Stable && !p_.stable_enabled)
      throw SimError(Err::StableDisabled, p_.id);
    if (p_.borrow_cap && total_debt() + amount > *p_.borrow_cap)
      throw SimError(Err::CapExceeded, p_.id);
    if (amount > cash_) throw SimError(Err::InsufficientLiquidity, p_.id);
    if (gate && !gate(a, amount)) throw SimError(Err::WouldBeUnhealthy, a.id);

    if (mode == DebtMode::Variable) {
      i128 scaled = mul_div_trunc(amount, RAY, epoch_var_index_);
      scaled_var_debt_ += scaled;
      a.scaled_variable_debt[p_.id] += scaled;
    } else {
      Rate user_rate = stable_borrow_rate_now();  // stable curve at current utilization
      i128 stab = epoch_stable_debt_;
      avg_stable_rate_ =
          stab + amount == 0
              ? user_rate.ray
              : i128(( i256(stab) * i256(avg_stable_rate_) + i256(amount) * i256(user_rate.ray)) /
                     i256(stab + amount));
      epoch_stable_debt_ += amount;
      auto& pos = a.stable_debt[p_.id];
      i128 cur = pos.principal == 0
                     ? i128(0)
                     : ray_mul(pos.principal,
                               compound_index_factor(Rate{pos.rate}, now - pos.since));
      pos.rate = cur + amount == 0
                     ? user_rate.ray
                     : i128((i256(cur) * i256(pos.rate) + i256(amount) * i256(user_rate.ray)) /
                            i256(cur + amount));
      pos.principal = cur + amount;
      pos.since = now;
    }
    cash_ -= amount;
    a.wallet[p_.asset] += amount;
    principal_outstanding_ += amount;
    finish_op();
  }

  // Returns the amount actually repaid (requests above current debt clamp).
  i128 repay(Account& a, i128 amount, DebtMode mode, Timestamp now) {
    settle(now);
    if (amount <= 0) throw SimError(Err::ZeroAmount, "repay");
    i128 repaid = repay_from_wallet(a, a, amount, mode, now);
    finish_op();
    return repaid;
  }

  // Liquidation path: `payer` covers `target`'s debt. Tries variable debt
  // first, then stable. Returns the amount repaid.
  i128 repay_on_behalf(Account& payer, Account& target, i128 amount, Timestamp now) {
    settle(now);
    if (amount <= 0) throw SimError(Err::ZeroAmount, "repay_on_behalf");
    i128 repaid = 0;
    if (variable_debt_of(target) > 0)
      repaid += repay_from_wallet(payer, target, amount, DebtMode::Variable, now);
    if (repaid < amount && stable_debt_of(target) > 0)
      repaid += repay_from_wallet(payer, target, amount - repaid, DebtMode::Stable, now);
    if (repaid == 0) throw SimError(Err::NoDebt, target.id);
    finish_op();
    return repaid;
  }

  // Transfers supplied collateral between accounts (receipt-token style; pool
  // totals are untouched). Returns the amount actually moved.
  i128 seize_collateral(Account& from, Account& to, i128 amount, Timestamp now) {
    settle(now);
    auto it = from.scaled_collateral.find(p_.id);
    if (it == from.scaled_collateral.end() || it->second == 0)
      throw SimError(Err::NoSuchCollateral, from.id);
    i128 delta = mul_div_ceil(amount, RAY, epoch_liq_index_);
    if (delta > it->second) delta = it->second;
    i128 moved = ray_mul(delta, epoch_liq_index_);
    it->second -= delta;
    to.scaled_collateral[p_.id] += delta;
    finish_op();
    return moved;
  }

  bool rebalance_stable_check(const Account& a) const {
    auto it = a.stable_debt.find(p_.id);
    if (it == a.stable_debt.end() || it->second.principal == 0)
      throw SimError(Err::NoStableDebt, a.id);
    return it->second.rate < supply_rate_now().ray;
  }

  // When triggered, the loan re-prices to the current stable-curve rate.
  bool rebalance_stable(Account& a, Timestamp now) {
    settle(now);
    if (!rebalance_stable_check(a)) {
      finish_op();
      return false;
    }
    auto& pos = a.stable_debt[p_.id];
    i128 cur = ray_mul(pos.principal, compound_index_factor(Rate{pos.rate}, now - pos.since));
    pos.principal = cur;
    pos.since = now;
    pos.rate = stable_borrow_rate_now().ray;
    finish_op();
    return true;
  }

  void set_rate_model(RateModel m, Timestamp effective) {
    settle(effective);
    p_.model = std::move(m);
    finish_op();
  }

  void set_stable_model(std::optional<RateModel> m, Timestamp effective) {
    settle(effective);
    p_.stable_model = std::move(m);
    finish_op();
  }

  void set_borrow_cap(std::optional<i128> cap, Timestamp effective) {
    settle(effective);
    p_.borrow_cap = cap;
    finish_op();
  }

  void set_pause(bool paused, Timestamp effective) {
    settle(effective);
    p_.borrowing_paused = paused;
    finish_op();
  }

  void set_stable_enabled(bool enabled, Timestamp effective) {
    settle(effective);
    p_.stable_enabled = enabled;
    finish_op();
  }

  // Engine hook: aggregate stable rate re-derived after a rebalance event.
  void set_avg_stable_rate(Rate r, Timestamp effective) {
    settle(effective);
    avg_stable_rate_ = r.ray;
    finish_op();
  }

  // Drains all pool cash into `to`'s wallet; fork-time bookkeeping where the
  // pool contract's own balance mints forked tokens to a synthetic account.
  i128 pool_cash_snapshot() const { return cash_; }

 private:
  std::int64_t delta_blocks(Timestamp to) const {
    std::int64_t ms = (to - epoch_time_) * 1000;
    return ms <= 0 ? 0 : ms / p_.avg_block_time_ms;
  }

  i128 growth_factor(Rate r, Timestamp to) const {
    if (p_.mode == AccrualMode::PerBlockLinear)
      return linear_index_factor(r, delta_blocks(to), p_.blocks);
    return compound_index_factor(r, to - epoch_time_);
  }

  // Materializes the epoch at `now` under the frozen rates.
  void settle(Timestamp now) {
    accrue(now);
    i128 var_idx = variable_borrow_index();
    i128 liq_idx = liquidity_index();
    i128 stab = total_stable_debt();
    i128 debt = ray_mul(scaled_var_debt_, var_idx) + stab;
    i128 supplied = ray_mul(scaled_supply_, liq_idx);
    i128 tre = treasury();
    epoch_var_index_ = var_idx;
    epoch_liq_index_ = liq_idx;
    epoch_stable_debt_ = stab;
    epoch_debt_ = debt;
    epoch_supplied_ = supplied;
    treasury_ = tre;
    epoch_time_ = now;
  }

  // Re-snapshots aggregates and re-prices the curve after a mutation.
  void finish_op() {
    epoch_debt_ = ray_mul(scaled_var_debt_, epoch_var_index_) + epoch_stable_debt_;
    epoch_supplied_ = ray_mul(scaled_supply_, epoch_liq_index_);
    epoch_var_rate_ = borrow_rate(p_.model, utilization());
  }

  i128 repay_from_wallet(Account& payer, Account& target, i128 amount, DebtMode mode,
                         Timestamp now) {
    i128 repaid = 0;
    if (mode == DebtMode::Variable) {
      i128 cur = variable_debt_of(target);
      if (cur == 0) throw SimError(Err::NoDebt, target.id);
      repaid = amount < cur ? amount : cur;
      if (payer.wallet_of(p_.asset) < repaid) throw SimError(Err::InsufficientWallet, payer.id);
      i128& scaled = target.scaled_variable_debt[p_.id];
      i128 delta = repaid == cur ? scaled : mul_div_trunc(repaid, RAY, epoch_var_index_);
      if (delta > scaled) delta = scaled;
      scaled -= delta;
      scaled_var_debt_ -= delta;
    } else {
      auto it = target.stable_debt.find(p_.id);
      if (it == target.stable_debt.end() || it->second.principal == 0)
        throw SimError(Err::NoDebt, target.id);
      auto& pos = it->second;
      i128 cur = ray_mul(pos.principal, compound_index_factor(Rate{pos.rate}, now - pos.since));
      repaid = amount < cur ? amount : cur;
      if (payer.wallet_of(p_.asset) < repaid) throw SimError(Err::InsufficientWallet, payer.id);
      pos.principal = cur - repaid;
      pos.since = now;
      epoch_stable_debt_ -= repaid < epoch_stable_debt_ ? repaid : epoch_stable_debt_;
    }
    payer.wallet[p_.asset] -= repaid;
    cash_ += repaid;
    i128 principal_part = repaid < principal_outstanding_ ? repaid : principal_outstanding_;
    principal_outstanding_ -= principal_part;
    return repaid;
  }

  Params p_;
  Timestamp last_accrual_;

  i128 cash_ = 0;
  i128 scaled_var_debt_ = 0;
  i128 scaled_supply_ = 0;
  i128 treasury_ = 0;
  i128 principal_outstanding_ = 0;

  // rate epoch
  Timestamp epoch_time_;
  i128 epoch_var_index_ = RAY;
  i128 epoch_liq_index_ = RAY;
  i128 epoch_stable_debt_ = 0;
  i128 epoch_debt_ = 0;
  i128 epoch_supplied_ = 0;
  Rate epoch_var_rate_{};
  i128 avg_stable_rate_ = 0;
};

using Markets = std::map<MarketId, Market>;

}  // namespace forksim
