#pragma once
#include <stdexcept>
#include <string>

namespace forksim {

enum class Err {
  // amounts / balances
  ZeroAmount,
  InsufficientWallet,
  InsufficientBalance,
  InsufficientLiquidity,
  NoDebt,
  NoStableDebt,
  // borrowing gates
  BorrowingPaused,
  CapExceeded,
  StableDisabled,
  WouldBeUnhealthy,
  // clocks
  ClockRegression,
  // liquidation
  NotLiquidatable,
  NoSuchCollateral,
  // pricing
  MissingPrice,
  ZeroEthPrice,
  NonPositiveHorizon,
  LookupBeforeStart,
  // series / files
  SeriesGap,
  MalformedRow,
  UnsortedTimestamps,
  EmptySeries,
  // fork / positions
  AlreadyForked,
  PositionOpen,
  InvalidLtv,
  // config
  BadModelSpec,
  BadScenario,
  Io,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::ZeroAmount: return "ZeroAmount";
    case Err::InsufficientWallet: return "InsufficientWallet";
    case Err::InsufficientBalance: return "InsufficientBalance";
    case Err::InsufficientLiquidity: return "InsufficientLiquidity";
    case Err::NoDebt: return "NoDebt";
    case Err::NoStableDebt: return "NoStableDebt";
    case Err::BorrowingPaused: return "BorrowingPaused";
    case Err::CapExceeded: return "CapExceeded";
    case Err::StableDisabled: return "StableDisabled";
    case Err::WouldBeUnhealthy: return "WouldBeUnhealthy";
    case Err::ClockRegression: return "ClockRegression";
    case Err::NotLiquidatable: return "NotLiquidatable";
    case Err::NoSuchCollateral: return "NoSuchCollateral";
    case Err::MissingPrice: return "MissingPrice";
    case Err::ZeroEthPrice: return "ZeroEthPrice";
    case Err::NonPositiveHorizon: return "NonPositiveHorizon";
    case Err::LookupBeforeStart: return "LookupBeforeStart";
    case Err::SeriesGap: return "SeriesGap";
    case Err::MalformedRow: return "MalformedRow";
    case Err::UnsortedTimestamps: return "UnsortedTimestamps";
    case Err::EmptySeries: return "EmptySeries";
    case Err::AlreadyForked: return "AlreadyForked";
    case Err::PositionOpen: return "PositionOpen";
    case Err::InvalidLtv: return "InvalidLtv";
    case Err::BadModelSpec: return "BadModelSpec";
    case Err::BadScenario: return "BadScenario";
    case Err::Io: return "Io";
  }
  return "Unknown";
}

class SimError : public std::runtime_error {
 public:
  SimError(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  explicit SimError(Err code) : SimError(code, "") {}
  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace forksim
