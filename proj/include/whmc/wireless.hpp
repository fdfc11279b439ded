#pragma once

#include <cstdint>
#include <string>

#include "whmc/rng.hpp"

namespace whmc::wireless {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class LinkName { kSensorUplink, kActuatorDownlink, kHumanLink };

const char* to_string(LinkName name);

struct LinkConfig {
  LinkName name = LinkName::kSensorUplink;
  double transmit_power_dbm = 20.0;
  double noise_power_dbm = -70.0;
  double carrier_frequency_hz = 915e6;
  double distance_m = 50.0;
  double antenna_gain = 4.0;  // linear, applied once
  double path_loss_exponent = 2.9;
  double code_rate = 2.0;     // bits per symbol
  int packet_length = 500;    // symbols
  double symbol_rate = 50e3;  // symbols per second
  bool ideal = false;         // every packet delivered, no fading draw consumed

  double airtime() const { return packet_length / symbol_rate; }
  void validate(const std::string& path, double min_transmit_power_dbm = 20.0) const;
  bool operator==(const LinkConfig&) const = default;
};

struct PacketOutcome {
  std::int64_t slot_index = 0;
  double fading_power = 1.0;
  double instantaneous_snr = 0.0;
  bool delivered = true;
};

double dbm_to_watts(double dbm);
double to_db(double linear);

/// Log-distance path loss with a free-space intercept at 1 m:
/// G * (lambda / 4 pi)^2 * d^-eta.
double average_gain(double distance_m, double frequency_hz, double antenna_gain,
                    double exponent);

double mean_snr(const LinkConfig& link);

/// Drop probability under unit-mean Rayleigh power fading.
double analytic_outage(double mean_snr, double code_rate);

/// Fading power at or above this value decodes.
double fading_threshold(double mean_snr, double code_rate);

bool decodes(double instantaneous_snr, double code_rate);

/// One packet slot on a block-fading link. The mean SNR is cached so the hot
/// loop is a single exponential draw and a comparison.
class Channel {
 public:
  Channel(LinkConfig config, RngStream stream);

  PacketOutcome transmit();
  /// Transmit with a caller-chosen fading power; used for tie-rule tests.
  PacketOutcome transmit_with_fading(double fading_power);

  const LinkConfig& config() const { return config_; }
  double mean_snr() const { return mean_snr_; }
  double threshold() const { return threshold_; }

 private:
  LinkConfig config_;
  RngStream stream_;
  double mean_snr_;
  double threshold_;
  std::int64_t next_slot_ = 0;
};

}  // namespace whmc::wireless
