#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mcsc::crypto {

using Block = std::array<std::uint8_t, 16>;

// 88-bit payload, plaintext or ciphertext.
using Payload88 = std::array<std::uint8_t, 11>;

// Shared symmetric AES-128 key. Deliberately has no stream or string output.
class AesKey
{
  public:
    AesKey() = default;
    explicit AesKey(const Block& bytes) : bytes_(bytes) {}

    // Parses exactly 32 hex digits; throws InvalidConfig otherwise.
    static AesKey fromHex(std::string_view hex);

    const Block& bytes() const noexcept { return bytes_; }

    friend bool operator==(const AesKey&, const AesKey&) = default;

  private:
    Block bytes_{};
};

enum class DomainTag : std::uint8_t
{
    Payload = 0x01,
    Prng = 0x02,
    Seed = 0x03,
};

// Input block of the keyed PRF. Byte layout (big-endian, 16 bytes):
//   [0..1] node address, [2..3] sequence, [4..11] slot index, [12] tag, [13..15] zero.
struct CounterBlock
{
    std::uint16_t nodeAddress = 0;
    std::uint16_t sequence = 0;
    std::uint64_t slotIndex = 0;
    DomainTag tag = DomainTag::Payload;

    Block toBytes() const noexcept;

    friend bool operator==(const CounterBlock&, const CounterBlock&) = default;
};

// AES-128 with an expanded key schedule, reusable across blocks.
class Aes128
{
  public:
    explicit Aes128(const AesKey& key);

    Block encrypt(const Block& in) const noexcept;
    Block decrypt(const Block& in) const noexcept;

  private:
    std::array<std::uint8_t, 176> roundKeys_{};
};

Block aes128EncryptBlock(const AesKey& key, const Block& block);
Block aes128DecryptBlock(const AesKey& key, const Block& block);

// First 11 bytes of the block cipher applied to the counter block.
Payload88 keystream88(const AesKey& key, const CounterBlock& counter);

// plaintext XOR keystream88(key, counter). decryptPayload is the same map.
Payload88 encryptPayload(const AesKey& key, const CounterBlock& counter, const Payload88& plaintext);
Payload88 decryptPayload(const AesKey& key, const CounterBlock& counter, const Payload88& ciphertext);

} // namespace mcsc::crypto
