#include "whmc/wireless.hpp"

#include <cmath>
#include <numbers>

#include "whmc/error.hpp"

namespace whmc::wireless {

const char* to_string(LinkName name) {
  switch (name) {
    case LinkName::kSensorUplink: return "sensor_uplink";
    case LinkName::kActuatorDownlink: return "actuator_downlink";
    case LinkName::kHumanLink: return "human_link";
  }
  return "unknown";
}

void LinkConfig::validate(const std::string& path, double min_transmit_power_dbm) const {
  auto fail = [&](const char* field, const char* why) {
    throw Error(ErrorKind::kConfig, path + "." + field + " " + why);
  };
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) fail("distance_m", "must be > 0");
  if (!(carrier_frequency_hz > 0.0) || !std::isfinite(carrier_frequency_hz)) {
    fail("carrier_frequency_hz", "must be > 0");
  }
  if (!(antenna_gain > 0.0)) fail("antenna_gain", "must be > 0");
  if (!(path_loss_exponent > 0.0)) fail("path_loss_exponent", "must be > 0");
  if (!(code_rate > 0.0)) fail("code_rate", "must be > 0");
  if (packet_length < 1) fail("packet_length", "must be >= 1");
  if (!(symbol_rate > 0.0)) fail("symbol_rate", "must be > 0");
  if (!std::isfinite(noise_power_dbm)) fail("noise_power_dbm", "must be finite");
  if (!std::isfinite(transmit_power_dbm) || transmit_power_dbm < min_transmit_power_dbm) {
    fail("transmit_power_dbm", "is below the minimum transmit power");
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double to_db(double linear) { return 10.0 * std::log10(linear); }

double average_gain(double distance_m, double frequency_hz, double antenna_gain,
                    double exponent) {
  const double wavelength = kSpeedOfLight / frequency_hz;
  const double intercept = wavelength / (4.0 * std::numbers::pi);
  return antenna_gain * intercept * intercept * std::pow(distance_m, -exponent);
}

double mean_snr(const LinkConfig& link) {
  const double gain = average_gain(link.distance_m, link.carrier_frequency_hz,
                                   link.antenna_gain, link.path_loss_exponent);
  return dbm_to_watts(link.transmit_power_dbm) * gain / dbm_to_watts(link.noise_power_dbm);
}

double analytic_outage(double mean_snr, double code_rate) {
  return -std::expm1(-std::expm1(code_rate * std::numbers::ln2) / mean_snr);
}

double fading_threshold(double mean_snr, double code_rate) {
  return std::expm1(code_rate * std::numbers::ln2) / mean_snr;
}

bool decodes(double instantaneous_snr, double code_rate) {
  return std::log2(1.0 + instantaneous_snr) >= code_rate;
}

Channel::Channel(LinkConfig config, RngStream stream)
    : config_(config),
      stream_(stream),
      mean_snr_(wireless::mean_snr(config)),
      threshold_(fading_threshold(mean_snr_, config.code_rate)) {}

PacketOutcome Channel::transmit() {
  if (config_.ideal) {
    return PacketOutcome{next_slot_++, 1.0, mean_snr_, true};
  }
  return transmit_with_fading(stream_.exponential());
}

PacketOutcome Channel::transmit_with_fading(double fading_power) {
  PacketOutcome out;
  out.slot_index = next_slot_++;
  out.fading_power = fading_power;
  out.instantaneous_snr = mean_snr_ * fading_power;
  // Comparing in the fading domain keeps the boundary inclusive exactly.
  out.delivered = fading_power >= threshold_;
  return out;
}

}  // namespace whmc::wireless
