#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "roadwatch/flow_check.hpp"

namespace roadwatch {

// Transport for worker-device messages. `send` returns false on failure.
class DeviceChannel {
 public:
  virtual ~DeviceChannel() = default;
  virtual bool send(std::string_view message) = 0;
};

// Writes each message to a stream (standard output in the CLI).
class StreamChannel final : public DeviceChannel {
 public:
  explicit StreamChannel(std::ostream& out) : out_(&out) {}
  bool send(std::string_view message) override;

 private:
  std::ostream* out_;
};

// One UDP datagram per message.
class UdpChannel final : public DeviceChannel {
 public:
  UdpChannel(const std::string& host, std::uint16_t port);
  ~UdpChannel() override;
  UdpChannel(const UdpChannel&) = delete;
  UdpChannel& operator=(const UdpChannel&) = delete;

  bool send(std::string_view message) override;
  void close() noexcept;
  bool is_open() const noexcept { return fd_ >= 0; }

 private:
  int fd_ = -1;
  std::vector<unsigned char> address_;  // sockaddr_in / sockaddr_in6 bytes
};

// Keeps everything in memory; can be closed to simulate a dead link.
class MemoryChannel final : public DeviceChannel {
 public:
  bool send(std::string_view message) override;
  void close() noexcept { closed_ = true; }
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  bool closed_ = false;
  std::vector<std::string> messages_;
};

// Parses "stdout" or "udp:<host>:<port>"; throws ConfigError("device", ...).
std::unique_ptr<DeviceChannel> make_device_channel(std::string_view spec, std::ostream& stdout_sink);

// Sends warnings best-effort. Re-emitting an already delivered warning is a
// no-op; failures are counted and never thrown.
class WarningEmitter {
 public:
  explicit WarningEmitter(DeviceChannel* channel) : channel_(channel) {}

  void emit(const WarningEvent& warning);

  std::size_t sent() const noexcept { return sent_; }
  std::size_t failed() const noexcept { return failed_; }

 private:
  DeviceChannel* channel_;
  std::set<std::tuple<long long, TrackId, Camera>> delivered_;
  std::size_t sent_ = 0;
  std::size_t failed_ = 0;
};

}  // namespace roadwatch
