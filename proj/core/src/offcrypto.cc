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
#include "lurescan/offcrypto.h"

#include <algorithm>
#include <array>
#include <cstring>
#include <memory>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "lurescan/strings.h"
#include "lurescan/cfbf.h"
#include "lurescan/error.h"
#include "lurescan/text.h"

namespace lurescan {
namespace {

constexpr int kSpinCount = 50000;
constexpr uint32_t kFlagCryptoApi = 0x04;
constexpr uint32_t kFlagAes = 0x20;
constexpr uint32_t kAlgAes128 = 0x660E;
constexpr uint32_t kAlgAes192 = 0x660F;
constexpr uint32_t kAlgAes256 = 0x6610;
constexpr uint32_t kAlgRc4 = 0x6801;

using Sha1Digest = std::array<uint8_t, SHA_DIGEST_LENGTH>;

Sha1Digest Sha1(ByteView a, ByteView b = {}) {
  Sha1Digest out;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, a.data(), a.size());
  if (!b.empty()) EVP_DigestUpdate(ctx, b.data(), b.size());
  EVP_DigestFinal_ex(ctx, out.data(), nullptr);
  EVP_MD_CTX_free(ctx);
  return out;
}

const EVP_CIPHER* EcbCipher(size_t key_len) {
  switch (key_len) {
    case 16: return EVP_aes_128_ecb();
    case 24: return EVP_aes_192_ecb();
    case 32: return EVP_aes_256_ecb();
    default: return nullptr;
  }
}

// AES-ECB decryption of whole blocks; `in` length must be a multiple of 16.
bool AesEcbDecrypt(ByteView key, ByteView in, uint8_t* out) {
  const EVP_CIPHER* cipher = EcbCipher(key.size());
  if (cipher == nullptr || in.size() % 16 != 0) return false;
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                       EVP_CIPHER_CTX_free);
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), cipher, nullptr, key.data(), nullptr) != 1) return false;
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  int produced = 0;
  // EVP_DecryptUpdate takes an int length; feed large payloads piecewise.
  constexpr size_t kStep = size_t{1} << 30;
  for (size_t done = 0; done < in.size(); done += kStep) {
    size_t n = std::min(kStep, in.size() - done);
    if (EVP_DecryptUpdate(ctx.get(), out + done, &produced, in.data() + done, static_cast<int>(n)) != 1) {
      return false;
    }
  }
  return true;
}

}  // namespace

absl::StatusOr<EncryptionHeader> ParseEncryptionInfo(ByteView info) {
  ByteReader r(info);
  EncryptionHeader h;
  uint32_t flags = 0, header_size = 0;
  if (!r.ReadU16(&h.version_major) || !r.ReadU16(&h.version_minor)) {
    return MakeError(ErrorCode::kTruncatedFile, "EncryptionInfo version missing");
  }
  if (h.version_major == 4 && h.version_minor == 4) {
    return MakeError(ErrorCode::kUnsupportedEncryption, "agile encryption (4.4) is not supported");
  }
  if (h.version_minor != 2 || h.version_major < 2 || h.version_major > 4) {
    return MakeError(ErrorCode::kUnsupportedEncryption,
                     Cat("EncryptionInfo version ", h.version_major, ".", h.version_minor,
                                  " is not Standard encryption"));
  }
  if (!r.ReadU32(&flags) || !r.ReadU32(&header_size)) {
    return MakeError(ErrorCode::kTruncatedFile, "EncryptionInfo flags missing");
  }
  ByteView header;
  if (header_size < 32 || !r.ReadSpan(header_size, &header)) {
    return MakeError(ErrorCode::kTruncatedFile, "EncryptionHeader truncated");
  }
  uint32_t alg_id = LoadLe32(header, 8);
  uint32_t key_size = LoadLe32(header, 16);
  if ((flags & kFlagCryptoApi) == 0 || (flags & kFlagAes) == 0 || alg_id == kAlgRc4) {
    return MakeError(ErrorCode::kUnsupportedEncryption, "RC4 / non-AES encryption is not supported");
  }
  switch (alg_id) {
    case 0:  // implied by fAES
    case kAlgAes128: h.algorithm = CipherAlgorithm::kAes128; break;
    case kAlgAes192: h.algorithm = CipherAlgorithm::kAes192; break;
    case kAlgAes256: h.algorithm = CipherAlgorithm::kAes256; break;
    default:
      return MakeError(ErrorCode::kUnsupportedEncryption, Cat("algorithm id 0x", HexNumber(alg_id)));
  }
  h.key_bits = key_size == 0 ? 128 : static_cast<int>(key_size);
  if (h.key_bits != 128 && h.key_bits != 192 && h.key_bits != 256) {
    return MakeError(ErrorCode::kUnsupportedEncryption, Cat("key size ", key_size));
  }

  uint32_t salt_size = 0, verifier_hash_size = 0;
  ByteView salt, verifier, verifier_hash;
  if (!r.ReadU32(&salt_size) || salt_size != 16 || !r.ReadSpan(16, &salt) || !r.ReadSpan(16, &verifier) ||
      !r.ReadU32(&verifier_hash_size) || !r.ReadSpan(32, &verifier_hash)) {
    return MakeError(ErrorCode::kTruncatedFile, "EncryptionVerifier truncated or malformed");
  }
  h.salt.assign(salt.begin(), salt.end());
  h.verifier.assign(verifier.begin(), verifier.end());
  h.verifier_hash.assign(verifier_hash.begin(), verifier_hash.end());
  return h;
}

Bytes DeriveKey(std::string_view password, ByteView salt, int key_bits) {
  Bytes utf16 = Utf8ToUtf16Le(password);
  Sha1Digest h = Sha1(salt, utf16);
  uint8_t buf[4 + SHA_DIGEST_LENGTH];
  for (uint32_t i = 0; i < kSpinCount; ++i) {
    buf[0] = static_cast<uint8_t>(i);
    buf[1] = static_cast<uint8_t>(i >> 8);
    buf[2] = static_cast<uint8_t>(i >> 16);
    buf[3] = static_cast<uint8_t>(i >> 24);
    std::memcpy(buf + 4, h.data(), h.size());
    SHA1(buf, sizeof(buf), h.data());
  }
  const uint8_t block_key[4] = {0, 0, 0, 0};
  Sha1Digest final_hash = Sha1(h, block_key);

  uint8_t ipad[64], opad[64];
  std::memset(ipad, 0x36, sizeof(ipad));
  std::memset(opad, 0x5C, sizeof(opad));
  for (size_t i = 0; i < final_hash.size(); ++i) {
    ipad[i] ^= final_hash[i];
    opad[i] ^= final_hash[i];
  }
  Sha1Digest x1 = Sha1(ipad), x2 = Sha1(opad);
  Bytes key(x1.begin(), x1.end());
  key.insert(key.end(), x2.begin(), x2.end());
  key.resize(static_cast<size_t>(key_bits) / 8);
  return key;
}

bool VerifyPassword(ByteView key, const EncryptionHeader& header) {
  if (key.size() * 8 != static_cast<size_t>(header.key_bits) || header.verifier.size() != 16 ||
      header.verifier_hash.size() != 32) {
    return false;
  }
  uint8_t verifier[16], verifier_hash[32];
  if (!AesEcbDecrypt(key, header.verifier, verifier) ||
      !AesEcbDecrypt(key, header.verifier_hash, verifier_hash)) {
    return false;
  }
  Sha1Digest expected = Sha1(ByteView(verifier, 16));
  return std::memcmp(expected.data(), verifier_hash, expected.size()) == 0;
}

absl::StatusOr<Bytes> DecryptPackage(ByteView key, ByteView encrypted_package) {
  if (encrypted_package.size() < 8) {
    return MakeError(ErrorCode::kLengthMismatch, "EncryptedPackage shorter than its size field");
  }
  uint64_t declared = LoadLe64(encrypted_package, 0);
  ByteView payload = encrypted_package.subspan(8);
  size_t whole = payload.size() / 16 * 16;
  if (declared > whole) {
    return MakeError(ErrorCode::kLengthMismatch,
                     Cat("declared length ", declared, " exceeds ", whole, " decrypted bytes"));
  }
  size_t needed = (declared + 15) / 16 * 16;
  Bytes out(needed);
  if (needed > 0 && !AesEcbDecrypt(key, payload.first(needed), out.data())) {
    return MakeError(ErrorCode::kDecryptionFailed, "AES-ECB decryption failed");
  }
  out.resize(declared);
  return out;
}

absl::StatusOr<DecryptedPackage> DecryptOoxml(ByteView cfbf_bytes,
                                              const std::vector<std::string>& passwords) {
  LURESCAN_ASSIGN_OR_RETURN(CompoundFile file, CompoundFile::Open(cfbf_bytes));
  LURESCAN_ASSIGN_OR_RETURN(Bytes info, file.ReadStream("EncryptionInfo"));
  LURESCAN_ASSIGN_OR_RETURN(EncryptionHeader header, ParseEncryptionInfo(info));
  for (const std::string& password : passwords) {
    if (password.empty()) continue;
    Bytes key = DeriveKey(password, header.salt, header.key_bits);
    if (!VerifyPassword(key, header)) continue;
    LURESCAN_ASSIGN_OR_RETURN(Bytes package, file.ReadStream("EncryptedPackage"));
    LURESCAN_ASSIGN_OR_RETURN(Bytes plain, DecryptPackage(key, package));
    return DecryptedPackage{std::move(plain), password, std::move(header)};
  }
  return MakeError(ErrorCode::kDecryptionFailed,
                   Cat("none of ", passwords.size(), " candidate passwords verified"));
}

}  // namespace lurescan
