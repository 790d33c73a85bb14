#pragma once

namespace kkb {

struct FsplParams {
  double frequency_mhz = 2400.0;
  double tx_power_dbm = 0.0;
};

// Free-space path loss with distance in meters and frequency in MHz:
//   FSPL(dB) = 20 log10(d) + 20 log10(f) - 27.55

/// Received power (dBm) at `meters` from a transmitter at tx_power_dbm.
double fspl_rssi(double meters, const FsplParams& params = {});

/// Inverse of fspl_rssi: estimated separation in meters for a received power.
double fspl_distance(double rssi_dbm, const FsplParams& params = {});

}  // namespace kkb
