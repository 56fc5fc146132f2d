#include "mcsc/packet.hpp"

#include "mcsc/error.hpp"

#include <boost/crc.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace mcsc::packet {

WireBytes serialize(const Frame& frame)
{
    WireBytes b{};
    b[0] = frame.nextChannel;
    b[1] = static_cast<std::uint8_t>(frame.nodeAddress >> 8);
    b[2] = static_cast<std::uint8_t>(frame.nodeAddress);
    std::copy(frame.payload.begin(), frame.payload.end(), b.begin() + 3);
    b[14] = static_cast<std::uint8_t>(frame.sequence >> 8);
    b[15] = static_cast<std::uint8_t>(frame.sequence);
    return b;
}

Frame deserialize(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != kFrameBytes)
        throw FramingError("frame must be 16 bytes, got " + std::to_string(bytes.size()));
    Frame f;
    f.nextChannel = bytes[0];
    f.nodeAddress = static_cast<std::uint16_t>((bytes[1] << 8) | bytes[2]);
    std::copy(bytes.begin() + 3, bytes.begin() + 14, f.payload.begin());
    f.sequence = static_cast<std::uint16_t>((bytes[14] << 8) | bytes[15]);
    return f;
}

BuildResult buildFrame(const TxContext& ctx, std::uint64_t slot, hopping::ChannelIndex nextChannel,
                       timesync::SyncStatus status, const crypto::Payload88& plaintext)
{
    if (status != timesync::SyncStatus::Synced)
        throw NotSynchronized("node " + std::to_string(ctx.nodeAddress) + " cannot packetize while desynchronized");
    if (nextChannel >= hopping::kMaxChannels)
        throw RangeError("next channel " + std::to_string(nextChannel) + " does not fit in 8 bits");

    const crypto::CounterBlock counter{ctx.nodeAddress, ctx.sequence, slot, crypto::DomainTag::Payload};

    BuildResult out;
    out.frame.nextChannel = static_cast<std::uint8_t>(nextChannel);
    out.frame.nodeAddress = ctx.nodeAddress;
    out.frame.payload = crypto::encryptPayload(ctx.key, counter, plaintext);
    out.frame.sequence = ctx.sequence;

    out.context = ctx;
    out.context.sequence = static_cast<std::uint16_t>(ctx.sequence + 1);
    if (out.context.sequence == 0) {
        out.wrapped = true;
        ++out.context.rotationEvents;
    }
    return out;
}

BuildResult buildFrame(const TxContext& ctx, const hopping::HopState& hop, timesync::SyncStatus status,
                       const crypto::Payload88& plaintext)
{
    const auto next = hopping::prngIndex(hop.seed, hop.currentSlot + 1, hop.plan.channelCount);
    return buildFrame(ctx, hop.currentSlot, next, status, plaintext);
}

bool ReplayGuard::contains(std::uint16_t sender, std::uint16_t sequence) const
{
    const auto it = windows_.find(sender);
    return it != windows_.end() && it->second.present.test(sequence);
}

bool ReplayGuard::admit(std::uint16_t sender, std::uint16_t sequence)
{
    Window& w = windows_[sender];
    if (w.present.test(sequence))
        return false;
    if (w.size == kReplayWindow) {
        w.present.reset(w.ring[w.head]);
    } else {
        ++w.size;
    }
    w.ring[w.head] = sequence;
    w.present.set(sequence);
    w.head = (w.head + 1) % kReplayWindow;
    return true;
}

OpenResult openFrame(const crypto::AesKey& key, const Frame& frame, std::uint64_t slot, ReplayGuard& guard)
{
    OpenResult out;
    out.nextChannel = frame.nextChannel;
    out.senderAddress = frame.nodeAddress;
    out.sequence = frame.sequence;
    if (!guard.admit(frame.nodeAddress, frame.sequence)) {
        out.status = OpenStatus::ReplayRejected;
        return out;
    }
    const crypto::CounterBlock counter{frame.nodeAddress, frame.sequence, slot, crypto::DomainTag::Payload};
    out.plaintext = crypto::decryptPayload(key, counter, frame.payload);
    return out;
}

namespace {

std::uint16_t crc16(std::span<const std::uint8_t> bytes)
{
    boost::crc_ccitt_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return static_cast<std::uint16_t>(crc.checksum());
}

} // namespace

WireBytes encodeBeacon(const timesync::SyncSignal& signal)
{
    WireBytes b{};
    const auto ns = static_cast<std::uint64_t>(std::llround(signal.masterTimeMs * 1e6));
    for (std::size_t i = 0; i < 8; ++i)
        b[i] = static_cast<std::uint8_t>(ns >> (56 - 8 * i));
    for (std::size_t i = 0; i < 6; ++i)
        b[8 + i] = static_cast<std::uint8_t>(signal.slotIndex >> (40 - 8 * i));
    const std::uint16_t crc = crc16(std::span<const std::uint8_t>(b.data(), 14));
    b[14] = static_cast<std::uint8_t>(crc >> 8);
    b[15] = static_cast<std::uint8_t>(crc);
    return b;
}

std::optional<timesync::SyncSignal> decodeBeacon(std::span<const std::uint8_t> bytes,
                                                 std::uint64_t seedRotationSlots)
{
    if (bytes.size() != kFrameBytes || seedRotationSlots == 0)
        return std::nullopt;
    const std::uint16_t expected = static_cast<std::uint16_t>((bytes[14] << 8) | bytes[15]);
    if (crc16(bytes.first(14)) != expected)
        return std::nullopt;
    std::uint64_t ns = 0;
    for (std::size_t i = 0; i < 8; ++i)
        ns = (ns << 8) | bytes[i];
    std::uint64_t slot = 0;
    for (std::size_t i = 0; i < 6; ++i)
        slot = (slot << 8) | bytes[8 + i];
    timesync::SyncSignal signal;
    signal.masterTimeMs = static_cast<double>(static_cast<std::int64_t>(ns)) / 1e6;
    signal.slotIndex = slot;
    signal.seedEpoch = slot / seedRotationSlots;
    return signal;
}

} // namespace mcsc::packet
