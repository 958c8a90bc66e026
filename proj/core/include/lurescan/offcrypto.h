// Copyright 2026 The lurescan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ECMA-376 Standard Encryption (AES-ECB, SHA-1 key derivation) for
// password-protected OOXML packages wrapped in a compound file.

#ifndef LURESCAN_OFFCRYPTO_H_
#define LURESCAN_OFFCRYPTO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lurescan/bytes.h"

namespace lurescan {

// Excel opens files encrypted with this password without prompting.
inline constexpr std::string_view kVelvetSweatshop = "VelvetSweatshop";

enum class CipherAlgorithm { kAes128, kAes192, kAes256 };

struct EncryptionHeader {
  uint16_t version_major = 0;
  uint16_t version_minor = 0;
  CipherAlgorithm algorithm = CipherAlgorithm::kAes128;
  int key_bits = 128;
  Bytes salt;           // 16 bytes
  Bytes verifier;       // 16 bytes, encrypted
  Bytes verifier_hash;  // 32 bytes, encrypted (SHA-1 padded to the block)
};

// Parses a binary Standard EncryptionInfo stream (versions 2.2, 3.2, 4.2).
// Agile (4.4), extensible (x.3) and RC4/CryptoAPI layouts are reported as
// UnsupportedEncryption.
absl::StatusOr<EncryptionHeader> ParseEncryptionInfo(ByteView encryption_info);

// Standard key derivation: 50000 rounds of iterated SHA-1 over the salted
// UTF-16LE password, block key 0, then the X1/X2 ipad/opad expansion.
Bytes DeriveKey(std::string_view password, ByteView salt, int key_bits);

// Decrypts the verifier pair with `key` and compares SHA-1 digests.
bool VerifyPassword(ByteView key, const EncryptionHeader& header);

// EncryptedPackage: LE64 plaintext length, then AES-ECB ciphertext.
// Errors: LengthMismatch if the declared length exceeds the payload.
absl::StatusOr<Bytes> DecryptPackage(ByteView key, ByteView encrypted_package);

struct DecryptedPackage {
  Bytes plaintext;
  std::string password;
  EncryptionHeader header;
};

// Tries each password in order against an encrypted compound file.
// Errors: cfbf errors, UnsupportedEncryption, DecryptionFailed when no
// password verifies, LengthMismatch.
absl::StatusOr<DecryptedPackage> DecryptOoxml(
    ByteView cfbf_bytes,
    const std::vector<std::string>& passwords = {std::string(kVelvetSweatshop)});

}  // namespace lurescan

#endif  // LURESCAN_OFFCRYPTO_H_
