#pragma once
#include <cstdint>
#include <variant>

#include "forksim/fixed.hpp"

// Interest-rate curves: AAVE's kinked model, Compound's legacy linear model
// and the jump model adopted ahead of the merge. All pure functions on ray
// fixed-point values.

namespace forksim {

struct Rate {
  i128 ray = 0;  // annualized fraction at 10^-27
  friend auto operator<=>(const Rate&, const Rate&) = default;
};

struct Utilization {
  i128 ray = 0;  // fraction in [0,1] at 10^-27
  friend auto operator<=>(const Utilization&, const Utilization&) = default;
};

struct ReserveFactor {
  i128 ray = 0;  // fraction in [0,1] at 10^-27
  friend auto operator<=>(const ReserveFactor&, const ReserveFactor&) = default;
};

struct AaveKinked {
  i128 r0 = 0;
  i128 slope1 = 0;
  i128 slope2 = 0;
  i128 u_optimal = 0;  // in (0,1)
};

struct CompoundLinear {
  i128 r0 = 0;
  i128 slope = 0;
};

struct CompoundJump {
  i128 r0 = 0;
  i128 slope1 = 0;
  i128 slope2 = 0;
  i128 kink = 0;  // in (0,1)
};

using RateModel = std::variant<AaveKinked, CompoundLinear, CompoundJump>;

// Kinked curve: below the optimal utilization the rate climbs to r0+slope1,
// beyond it the remaining headroom is charged on slope2. The boundary point
// itself takes the first branch.
inline Rate aave_rate(const AaveKinked& m, Utilization u) {
  if (u.ray <= m.u_optimal) {
    return Rate{m.r0 + mul_div_half_up(u.ray, m.slope1, m.u_optimal)};
  }
  return Rate{m.r0 + m.slope1 + mul_div_half_up(u.ray - m.u_optimal, m.slope2, RAY - m.u_optimal)};
}

inline Rate compound_linear_rate(const CompoundLinear& m, Utilization u) {
  return Rate{m.r0 + ray_mul(u.ray, m.slope)};
}

inline Rate compound_jump_rate(const CompoundJump& m, Utilization u) {
  i128 r = m.r0 + ray_mul(u.ray, m.slope1);
  if (u.ray > m.kink) r += ray_mul(u.ray - m.kink, m.slope2);
  return Rate{r};
}

inline Rate borrow_rate(const RateModel& m, Utilization u) {
  return std::visit(
      [&](const auto& v) -> Rate {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, AaveKinked>) return aave_rate(v, u);
        else if constexpr (std::is_same_v<T, CompoundLinear>) return compound_linear_rate(v, u);
        else return compound_jump_rate(v, u);
      },
      m);
}

// s = U * (share_s * avg_stable + share_v * variable) * (1 - R)
inline Rate aave_supply_rate(Utilization u, i128 stable_share_ray, Rate avg_stable_rate,
                             i128 variable_share_ray, Rate variable_rate, ReserveFactor reserve) {
  i128 weighted = ray_mul(stable_share_ray, avg_stable_rate.ray) +
                  ray_mul(variable_share_ray, variable_rate.ray);
  return Rate{ray_mul(ray_mul(u.ray, weighted), RAY - reserve.ray)};
}

// s = r * U * (1 - R)
inline Rate compound_supply_rate(Rate borrow, Utilization u, ReserveFactor reserve) {
  return Rate{ray_mul(ray_mul(borrow.ray, u.ray), RAY - reserve.ray)};
}

struct BlockConvention {
  std::int64_t contract_blocks_per_year = 2102400;
  std::int64_t display_blocks_per_day = 6245;
};

// Contract convention: the configured annual rate divided over the assumed
// 2,102,400 blocks, truncating at ray scale.
inline Rate annual_to_per_block(Rate annual, const BlockConvention& conv) {
  return Rate{annual.ray / conv.contract_blocks_per_year};
}

// Display convention re-annualizes the per-block rate at the observed
// pre-merge block cadence (6,245/day, 2,279,425/year).
inline Rate per_block_to_display_annual(Rate per_block, const BlockConvention& conv) {
  return Rate{per_block.ray * conv.display_blocks_per_day * 365};
}

inline Rate annual_to_display_annual(Rate annual, const BlockConvention& conv) {
  return per_block_to_display_annual(annual_to_per_block(annual, conv), conv);
}

// Index growth factor for per-block linear accrual over delta_blocks.
// Computed as RAY + rate*delta/blocks_per_year so that a full contract-year
// at rate r yields exactly 1+r.
inline i128 linear_index_factor(Rate annual, std::int64_t delta_blocks,
                                const BlockConvention& conv) {
  return RAY + mul_div_trunc(annual.ray, i128(delta_blocks), i128(conv.contract_blocks_per_year));
}

// Index growth factor for per-second compounding: (1 + r/Nyear)^delta.
inline i128 compound_index_factor(Rate annual, std::int64_t delta_seconds) {
  if (delta_seconds <= 0 || annual.ray == 0) return RAY;
  i128 per_second = annual.ray / kSecondsPerYear;  // truncating
  return ray_pow(RAY + per_second, static_cast<std::uint64_t>(delta_seconds));
}

}  // namespace forksim
