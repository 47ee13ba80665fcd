#pragma once
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "forksim/errors.hpp"
#include "forksim/fixed.hpp"
#include "forksim/market.hpp"

// Hourly (or any-cadence) price series. CSV schema:
//   timestamp,asset,price_usd
// timestamps ascending per asset; lookups carry the last observation forward.

namespace forksim {

class PriceSeries {
 public:
  void add(const AssetId& asset, Timestamp t, i128 price_wad) {
    auto& v = series_[asset];
    if (!v.empty() && t < v.back().first)
      throw SimError(Err::UnsortedTimestamps, asset);
    v.emplace_back(t, price_wad);
  }

  bool empty() const { return series_.empty(); }

  bool has(const AssetId& asset) const { return series_.count(asset) > 0; }

  Timestamp first_time(const AssetId& asset) const {
    auto it = series_.find(asset);
    if (it == series_.end() || it->second.empty()) throw SimError(Err::MissingPrice, asset);
    return it->second.front().first;
  }

  // value plus the timestamp of the carried-forward observation
  std::pair<Timestamp, i128> at_obs(const AssetId& asset, Timestamp t) const {
    auto it = series_.find(asset);
    if (it == series_.end() || it->second.empty()) throw SimError(Err::MissingPrice, asset);
    const auto& v = it->second;
    if (t < v.front().first) throw SimError(Err::LookupBeforeStart, asset);
    std::size_t lo = 0, hi = v.size();
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (v[mid].first <= t) lo = mid;
      else hi = mid;
    }
    return v[lo];
  }

  i128 at(const AssetId& asset, Timestamp t) const { return at_obs(asset, t).second; }

  std::vector<AssetId> assets() const {
    std::vector<AssetId> out;
    for (const auto& [a, _] : series_) out.push_back(a);
    return out;
  }

 private:
  std::map<AssetId, std::vector<std::pair<Timestamp, i128>>> series_;
};

inline PriceSeries ingest_prices(std::istream& in) {
  PriceSeries out;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "timestamp,asset,price_usd") continue;  // header optional but expected
    }
    std::istringstream ss(line);
    std::string ts, asset, px;
    if (!std::getline(ss, ts, ',') || !std::getline(ss, asset, ',') || !std::getline(ss, px))
      throw SimError(Err::MalformedRow, "line " + std::to_string(lineno));
    try {
      out.add(asset, std::stoll(ts), parse_wad(px));
    } catch (const SimError&) {
      throw;
    } catch (...) {
      throw SimError(Err::MalformedRow, "line " + std::to_string(lineno));
    }
  }
  if (out.empty()) throw SimError(Err::EmptySeries, "no price rows");
  return out;
}

inline PriceSeries ingest_prices(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError(Err::Io, "cannot open " + path);
  return ingest_prices(f);
}

}  // namespace forksim
