#pragma once

#include "mcsc/crypto.hpp"
#include "mcsc/hopping.hpp"
#include "mcsc/timesync.hpp"

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace mcsc::packet {

inline constexpr std::size_t kFrameBytes = 16;
inline constexpr std::size_t kFrameBits = kFrameBytes * 8;
inline constexpr std::size_t kReplayWindow = 4096;

using WireBytes = std::array<std::uint8_t, kFrameBytes>;

// 128-bit frame, wire order: next channel (8) | node address (16) |
// encrypted payload (88) | sequence (16). Multi-byte fields are big-endian.
struct Frame
{
    std::uint8_t nextChannel = 0;
    std::uint16_t nodeAddress = 0;
    crypto::Payload88 payload{};
    std::uint16_t sequence = 0;

    friend bool operator==(const Frame&, const Frame&) = default;
};

WireBytes serialize(const Frame& frame);

// Throws FramingError unless bytes.size() == 16.
Frame deserialize(std::span<const std::uint8_t> bytes);

struct TxContext
{
    crypto::AesKey key;
    std::uint16_t nodeAddress = 0;
    std::uint16_t sequence = 0;
    std::uint64_t rotationEvents = 0; // sequence wraps, each demands a seed rotation
};

struct BuildResult
{
    Frame frame;
    TxContext context;
    bool wrapped = false;
};

// Packetization: encrypts under CounterBlock(address, sequence, slot) and
// stamps the given next-channel hint. Throws NotSynchronized when the sender
// is not synced and RangeError when the hint does not fit the 8-bit field.
BuildResult buildFrame(const TxContext& ctx, std::uint64_t slot, hopping::ChannelIndex nextChannel,
                       timesync::SyncStatus status, const crypto::Payload88& plaintext);

// Same, with the hint taken from the keyed hop sequence at hop.currentSlot + 1.
BuildResult buildFrame(const TxContext& ctx, const hopping::HopState& hop, timesync::SyncStatus status,
                       const crypto::Payload88& plaintext);

// Remembers the most recent kReplayWindow sequence numbers accepted from each
// sender. A sequence is rejected while it is inside that window and accepted
// again once kReplayWindow newer sequences have pushed it out.
class ReplayGuard
{
  public:
    // True if (sender, sequence) is fresh; records it.
    bool admit(std::uint16_t sender, std::uint16_t sequence);
    bool contains(std::uint16_t sender, std::uint16_t sequence) const;

  private:
    struct Window
    {
        std::bitset<65536> present;
        std::vector<std::uint16_t> ring = std::vector<std::uint16_t>(kReplayWindow);
        std::size_t head = 0;
        std::size_t size = 0;
    };
    std::unordered_map<std::uint16_t, Window> windows_;
};

enum class OpenStatus
{
    Accepted,
    ReplayRejected,
};

struct OpenResult
{
    OpenStatus status = OpenStatus::Accepted;
    crypto::Payload88 plaintext{};
    hopping::ChannelIndex nextChannel = 0;
    std::uint16_t senderAddress = 0;
    std::uint16_t sequence = 0;
};

// Receiver side: replay check, then decryption at the receiver's slot.
OpenResult openFrame(const crypto::AesKey& key, const Frame& frame, std::uint64_t slot, ReplayGuard& guard);

// Sync beacon, also 16 bytes: master time in nanoseconds (int64) | slot index
// (48 bits) | CRC-16/CCITT-FALSE over the first 14 bytes. The seed epoch is
// not sent; receivers derive it from the slot index and the rotation period.
WireBytes encodeBeacon(const timesync::SyncSignal& signal);

// nullopt when the length or the CRC is wrong.
std::optional<timesync::SyncSignal> decodeBeacon(std::span<const std::uint8_t> bytes,
                                                 std::uint64_t seedRotationSlots);

} // namespace mcsc::packet
