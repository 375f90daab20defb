#include "lmgeo/measurement.hpp"

#include <charconv>
#include <cmath>

#include "lmgeo/error.hpp"

namespace lmgeo {

std::optional<std::uint32_t> parse_ipv4(std::string_view s) {
  std::uint32_t ip = 0;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  for (int part = 0; part < 4; ++part) {
    if (part > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    if (p == end || *p < '0' || *p > '9') return std::nullopt;
    unsigned value = 0;
    const char* start = p;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || value > 255 || next - start > 3) return std::nullopt;
    if (next - start > 1 && *start == '0') return std::nullopt;
    ip = (ip << 8) | value;
    p = next;
  }
  if (p != end) return std::nullopt;
  return ip;
}

std::string format_ipv4(std::uint32_t ip) {
  return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xFF) + "." +
         std::to_string((ip >> 8) & 0xFF) + "." + std::to_string(ip & 0xFF);
}

void DelayVector::set(ProbeId probe, double rtt_ms) {
  if (!std::isfinite(rtt_ms) || rtt_ms < 0.0) {
    throw InputError("rtt for probe " + std::to_string(probe) + " must be finite and >= 0");
  }
  rtts_[probe] = rtt_ms;
}

std::optional<double> DelayVector::get(ProbeId probe) const {
  const auto it = rtts_.find(probe);
  if (it == rtts_.end()) return std::nullopt;
  return it->second;
}

bool TraceRoute::monotone() const {
  double last = 0.0;
  for (const auto& h : hops) {
    if (h.rtt_ms < last) return false;
    last = h.rtt_ms;
  }
  return !destination_rtt_ms || *destination_rtt_ms >= last;
}

}  // namespace lmgeo
