#include "roadwatch/device.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <ostream>

#include "roadwatch/errors.hpp"

namespace roadwatch {

bool StreamChannel::send(std::string_view message) {
  *out_ << message << '\n';
  out_->flush();
  return static_cast<bool>(*out_);
}

UdpChannel::UdpChannel(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0 || found == nullptr) {
    throw ConfigError("device", "cannot resolve UDP host '" + host + "'");
  }
  fd_ = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
  if (fd_ >= 0) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(found->ai_addr);
    address_.assign(bytes, bytes + found->ai_addrlen);
  }
  freeaddrinfo(found);
  if (fd_ < 0) throw ConfigError("device", std::string("cannot open UDP socket: ") + std::strerror(errno));
}

UdpChannel::~UdpChannel() { close(); }

void UdpChannel::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

bool UdpChannel::send(std::string_view message) {
  if (fd_ < 0) return false;
  std::string datagram(message);
  datagram += '\n';
  const auto n = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                          reinterpret_cast<const sockaddr*>(address_.data()),
                          static_cast<socklen_t>(address_.size()));
  return n == static_cast<ssize_t>(datagram.size());
}

bool MemoryChannel::send(std::string_view message) {
  if (closed_) return false;
  messages_.emplace_back(message);
  return true;
}

std::unique_ptr<DeviceChannel> make_device_channel(std::string_view spec, std::ostream& stdout_sink) {
  if (spec == "stdout") return std::make_unique<StreamChannel>(stdout_sink);
  constexpr std::string_view kUdp = "udp:";
  if (spec.substr(0, kUdp.size()) == kUdp) {
    const std::string_view rest = spec.substr(kUdp.size());
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
      throw ConfigError("device", "expected udp:<host>:<port>");
    std::string host(rest.substr(0, colon));
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    const std::string_view port_text = rest.substr(colon + 1);
    unsigned port = 0;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535)
      throw ConfigError("device", "invalid UDP port '" + std::string(port_text) + "'");
    return std::make_unique<UdpChannel>(host, static_cast<std::uint16_t>(port));
  }
  throw ConfigError("device", "expected 'stdout' or 'udp:<host>:<port>', got '" + std::string(spec) + "'");
}

void WarningEmitter::emit(const WarningEvent& warning) {
  if (channel_ == nullptr) return;
  const auto key = std::make_tuple(std::llround(warning.timestamp * 1000.0), warning.track_id,
                                   warning.camera);
  if (delivered_.contains(key)) return;
  if (channel_->send(format_warning_line(warning))) {
    delivered_.insert(key);
    ++sent_;
  } else {
    ++failed_;
  }
}

}  // namespace roadwatch
