// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pksim/crypto/envelope.hpp"
#include "pksim/crypto/keys.hpp"

namespace pksim::crypto {

class HandshakeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class AuthenticationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class StaleBundleError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class SessionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Direction { InitiatorToResponder, ResponderToInitiator };

// Direction of the chain with ratchet index x: the initiator owns the even
// chains, the responder the odd ones.
inline Direction chain_direction(std::uint32_t ratchet_index) {
    return ratchet_index % 2 == 0 ? Direction::InitiatorToResponder
                                  : Direction::ResponderToInitiator;
}

struct ChainState {
    Key32 chain_key{};
    std::uint32_t ratchet_index = 0;    // x
    std::uint32_t next_message_index = 0;  // y of the next message on this chain
};

struct MessageKey {
    Key32 key{};
    std::uint32_t ratchet_index = 0;
    std::uint32_t message_index = 0;
    Direction direction = Direction::InitiatorToResponder;
};

// The key subset of a served prekey bundle that the handshake consumes.
struct HandshakeBundle {
    PublicKey identity{};  // responder identity public (Ed25519 encoding)
    std::uint32_t signed_prekey_id = 0;
    PublicKey signed_prekey{};
    Signature signed_prekey_signature{};
    std::optional<std::pair<std::uint32_t, PublicKey>> one_time_prekey;
};

struct SessionState {
    bool is_initiator = false;
    PublicKey local_identity{};
    PublicKey remote_identity{};

    Key32 root_key{};
    std::optional<ChainState> send_chain;
    std::optional<ChainState> recv_chain;

    std::optional<RatchetKeyPair> local_ratchet;
    bool local_ratchet_spent = false;  // secret already used in a receive step
    std::optional<PublicKey> remote_ratchet;

    std::optional<std::uint32_t> used_one_time_prekey_id;
    bool fs_restored = false;

    PublicKey initiator_identity{};
    PublicKey responder_identity{};
};

// rk_0 plus the number of DH invocations the handshake mix performed
// (4 with a one-time prekey, 3 without).
struct X3dhSecret {
    Key32 root_key{};
    int dh_invocations = 0;
};

X3dhSecret x3dh_initiator_secret(const IdentityKeyPair& initiator_identity,
                                 const EphemeralHandshakeKeyPair& ephemeral,
                                 const HandshakeBundle& bundle);

X3dhSecret x3dh_responder_secret(const IdentityKeyPair& responder_identity,
                                 const SignedPrekeyPair& signed_prekey,
                                 const OneTimePrekeyPair* one_time_prekey,
                                 const PublicKey& initiator_identity_public,
                                 const PublicKey& initiator_ephemeral_public);

struct InitiateResult {
    SessionState session;
    Envelope envelope;
    int handshake_dh_invocations = 0;
};

// Full initiator handshake: verifies the bundle signature, draws the
// ephemeral handshake pair and then the ratchet pair (in that order), mixes
// the shared secret, runs the ratchet init step and encrypts the first
// message under mk_{0,0}.
InitiateResult x3dh_initiate(const IdentityKeyPair& initiator_identity,
                             const HandshakeBundle& bundle, ByteSpan first_message, Rng& rng);

struct RespondResult {
    SessionState session;
    Bytes plaintext;
};

RespondResult x3dh_respond(const IdentityKeyPair& responder_identity,
                           const SignedPrekeyPair& signed_prekey,
                           const OneTimePrekeyPair* one_time_prekey, const Envelope& envelope,
                           const PublicKey& initiator_identity_public);

// Advances the sending chain by one message key.
MessageKey symmetric_ratchet_send(SessionState& session);

// Responder-side DH ratchet step: fresh ratchet pair, new root, new sending
// chain. Also used by the initiator when its sending chain has gone stale.
void asymmetric_ratchet_respond(SessionState& session, Rng& rng);

Envelope encrypt_next(SessionState& session, ByteSpan message, Rng& rng);
Bytes decrypt_next(SessionState& session, const Envelope& envelope);

enum class OracleOutcome {
    Decrypted,              // message key recomputed from long/medium-term secrets
    MissingOneTimeSecret,   // session mixed a one-time prekey the oracle lacks
    RatchetProtected,       // sent after a DH ratchet step; needs ephemeral secrets
    UnknownSession,         // no observed handshake envelope for this chain
    AuthenticationFailed,
};

struct OracleResult {
    OracleOutcome outcome = OracleOutcome::AuthenticationFailed;
    std::optional<Bytes> plaintext;

    bool decrypted() const { return outcome == OracleOutcome::Decrypted; }
};

// Key-compromise decryption attempt over a recorded transcript, given only
// the responder's long-term identity secret and medium-term signed-prekey
// secret (Curve25519 scalars). Refuses secrets that were erased.
std::vector<OracleResult> compromise_oracle(const std::vector<Envelope>& recorded,
                                            const SecretKey& identity_dh_secret,
                                            const SecretKey& signed_prekey_secret);

}  // namespace pksim::crypto
