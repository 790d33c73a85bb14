#include "kkb/radio.hpp"

#include <cmath>

#include "kkb/error.hpp"

namespace kkb {

namespace {
void check(const FsplParams& params) {
  if (!(params.frequency_mhz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frequency must be positive");
  }
}
}  // namespace

double fspl_rssi(double meters, const FsplParams& params) {
  check(params);
  const double loss = 20.0 * std::log10(meters) + 20.0 * std::log10(params.frequency_mhz) - 27.55;
  return params.tx_power_dbm - loss;
}

double fspl_distance(double rssi_dbm, const FsplParams& params) {
  check(params);
  const double loss = params.tx_power_dbm - rssi_dbm;
  return std::pow(10.0, (loss + 27.55 - 20.0 * std::log10(params.frequency_mhz)) / 20.0);
}

}  // namespace kkb
