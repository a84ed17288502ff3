// SPDX-License-Identifier: Apache-2.0
#include "pksim/crypto/session.hpp"

#include <cstring>

namespace pksim::crypto {

namespace {

Bytes concat_dh(const std::vector<Key32>& parts) {
    Bytes out;
    out.reserve(parts.size() * 32);
    for (const Key32& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

MessageKey advance_chain(ChainState& chain) {
    MessageStepKeys step = kdf_message_step(chain.chain_key);
    MessageKey mk;
    mk.key = step.message_key;
    mk.ratchet_index = chain.ratchet_index;
    mk.message_index = chain.next_message_index;
    mk.direction = chain_direction(chain.ratchet_index);
    chain.chain_key = step.chain_key;
    chain.next_message_index += 1;
    return mk;
}

}  // namespace

X3dhSecret x3dh_initiator_secret(const IdentityKeyPair& initiator_identity,
                                 const EphemeralHandshakeKeyPair& ephemeral,
                                 const HandshakeBundle& bundle) {
    PublicKey responder_dh_identity = identity_dh_public(bundle.identity);
    std::vector<Key32> parts;
    parts.push_back(dh(initiator_identity.dh_secret(), bundle.signed_prekey));
    parts.push_back(dh(ephemeral.pair.secret, responder_dh_identity));
    parts.push_back(dh(ephemeral.pair.secret, bundle.signed_prekey));
    if (bundle.one_time_prekey) parts.push_back(dh(ephemeral.pair.secret, bundle.one_time_prekey->second));
    return X3dhSecret{kdf_root_initial(concat_dh(parts)), static_cast<int>(parts.size())};
}

X3dhSecret x3dh_responder_secret(const IdentityKeyPair& responder_identity,
                                 const SignedPrekeyPair& signed_prekey,
                                 const OneTimePrekeyPair* one_time_prekey,
                                 const PublicKey& initiator_identity_public,
                                 const PublicKey& initiator_ephemeral_public) {
    PublicKey initiator_dh_identity = identity_dh_public(initiator_identity_public);
    std::vector<Key32> parts;
    parts.push_back(dh(signed_prekey.pair.secret, initiator_dh_identity));
    parts.push_back(dh(responder_identity.dh_secret(), initiator_ephemeral_public));
    parts.push_back(dh(signed_prekey.pair.secret, initiator_ephemeral_public));
    if (one_time_prekey) parts.push_back(dh(one_time_prekey->pair.secret, initiator_ephemeral_public));
    return X3dhSecret{kdf_root_initial(concat_dh(parts)), static_cast<int>(parts.size())};
}

InitiateResult x3dh_initiate(const IdentityKeyPair& initiator_identity,
                             const HandshakeBundle& bundle, ByteSpan first_message, Rng& rng) {
    if (!verify_identity_signature(bundle.identity, bundle.signed_prekey,
                                   bundle.signed_prekey_signature))
        throw HandshakeError("signed prekey signature does not verify");

    EphemeralHandshakeKeyPair ephemeral = EphemeralHandshakeKeyPair::generate(rng);
    RatchetKeyPair ratchet = RatchetKeyPair::generate(rng);

    X3dhSecret shared = x3dh_initiator_secret(initiator_identity, ephemeral, bundle);

    Key32 ratchet_dh = dh(ratchet.pair.secret, bundle.signed_prekey);
    RatchetStepKeys init_step = kdf_ratchet_step(shared.root_key, ratchet_dh);

    SessionState session;
    session.is_initiator = true;
    session.local_identity = initiator_identity.public_key();
    session.remote_identity = bundle.identity;
    session.initiator_identity = initiator_identity.public_key();
    session.responder_identity = bundle.identity;
    session.root_key = init_step.root_key;
    session.send_chain = ChainState{init_step.chain_key, 0, 0};
    session.remote_ratchet.reset();  // responder has not ratcheted yet
    if (bundle.one_time_prekey) session.used_one_time_prekey_id = bundle.one_time_prekey->first;

    Envelope envelope;
    envelope.header.ratchet_index = 0;
    envelope.header.message_index = 0;
    envelope.header.ratchet_public = ratchet.pair.pub;
    envelope.header.initiator_identity = session.initiator_identity;
    envelope.header.responder_identity = session.responder_identity;
    HandshakeHeader hs;
    hs.ephemeral_public = ephemeral.pair.pub;
    hs.signed_prekey_id = bundle.signed_prekey_id;
    if (bundle.one_time_prekey) hs.one_time_prekey_id = bundle.one_time_prekey->first;
    envelope.header.handshake = hs;

    MessageKey mk = advance_chain(*session.send_chain);
    envelope.payload = aead_encrypt(mk.key, first_message, envelope.associated_data(), rng);

    session.local_ratchet = std::move(ratchet);

    InitiateResult result;
    result.session = std::move(session);
    result.envelope = std::move(envelope);
    result.handshake_dh_invocations = shared.dh_invocations;
    return result;
}

RespondResult x3dh_respond(const IdentityKeyPair& responder_identity,
                           const SignedPrekeyPair& signed_prekey,
                           const OneTimePrekeyPair* one_time_prekey, const Envelope& envelope,
                           const PublicKey& initiator_identity_public) {
    if (!envelope.header.handshake) throw HandshakeError("envelope carries no handshake header");
    const HandshakeHeader& hs = *envelope.header.handshake;
    if (hs.signed_prekey_id != signed_prekey.key_id)
        throw StaleBundleError("signed prekey id not held by responder");
    if (hs.one_time_prekey_id) {
        if (!one_time_prekey || one_time_prekey->key_id != *hs.one_time_prekey_id)
            throw StaleBundleError("one-time prekey secret not held by responder");
    } else if (one_time_prekey) {
        throw HandshakeError("one-time prekey supplied but not referenced by envelope");
    }

    X3dhSecret shared = x3dh_responder_secret(responder_identity, signed_prekey, one_time_prekey,
                                              initiator_identity_public, hs.ephemeral_public);

    Key32 ratchet_dh = dh(signed_prekey.pair.secret, envelope.header.ratchet_public);
    RatchetStepKeys init_step = kdf_ratchet_step(shared.root_key, ratchet_dh);

    SessionState session;
    session.is_initiator = false;
    session.local_identity = responder_identity.public_key();
    session.remote_identity = initiator_identity_public;
    session.initiator_identity = initiator_identity_public;
    session.responder_identity = responder_identity.public_key();
    session.root_key = init_step.root_key;
    session.recv_chain = ChainState{init_step.chain_key, 0, 0};
    session.remote_ratchet = envelope.header.ratchet_public;
    if (hs.one_time_prekey_id) session.used_one_time_prekey_id = *hs.one_time_prekey_id;

    MessageKey mk = advance_chain(*session.recv_chain);
    std::optional<Bytes> plaintext =
        aead_decrypt(mk.key, envelope.payload, envelope.associated_data());
    if (!plaintext) throw AuthenticationError("initial message failed authentication");

    return RespondResult{std::move(session), std::move(*plaintext)};
}

MessageKey symmetric_ratchet_send(SessionState& session) {
    if (!session.send_chain) throw SessionError("no sending chain");
    return advance_chain(*session.send_chain);
}

void asymmetric_ratchet_respond(SessionState& session, Rng& rng) {
    if (!session.recv_chain) throw SessionError("asymmetric step requires a received message");
    if (!session.remote_ratchet) throw SessionError("no remote ratchet public");

    // The previous local ratchet secret (if any) is superseded here; wipe it
    // before the fresh pair takes its place.
    if (session.local_ratchet && !session.local_ratchet->pair.secret.erased())
        session.local_ratchet->pair.secret.erase();

    RatchetKeyPair fresh = RatchetKeyPair::generate(rng);
    Key32 ratchet_dh = dh(fresh.pair.secret, *session.remote_ratchet);
    RatchetStepKeys step = kdf_ratchet_step(session.root_key, ratchet_dh);
    session.root_key = step.root_key;
    session.send_chain = ChainState{step.chain_key, session.recv_chain->ratchet_index + 1, 0};
    session.local_ratchet = std::move(fresh);
    session.local_ratchet_spent = false;
    session.fs_restored = true;
}

Envelope encrypt_next(SessionState& session, ByteSpan message, Rng& rng) {
    bool stale = !session.send_chain ||
                 (session.recv_chain &&
                  session.recv_chain->ratchet_index > session.send_chain->ratchet_index);
    if (stale) asymmetric_ratchet_respond(session, rng);

    MessageKey mk = symmetric_ratchet_send(session);

    Envelope envelope;
    envelope.header.ratchet_index = mk.ratchet_index;
    envelope.header.message_index = mk.message_index;
    envelope.header.ratchet_public = session.local_ratchet->pair.pub;
    envelope.header.initiator_identity = session.initiator_identity;
    envelope.header.responder_identity = session.responder_identity;
    envelope.payload = aead_encrypt(mk.key, message, envelope.associated_data(), rng);
    return envelope;
}

Bytes decrypt_next(SessionState& session, const Envelope& envelope) {
    const EnvelopeHeader& h = envelope.header;
    if (h.initiator_identity != session.initiator_identity ||
        h.responder_identity != session.responder_identity)
        throw SessionError("envelope addressed to a different session");

    bool new_ratchet = !session.remote_ratchet || h.ratchet_public != *session.remote_ratchet;
    if (new_ratchet) {
        std::uint32_t expected =
            session.recv_chain ? session.recv_chain->ratchet_index + 2
                               : (session.is_initiator ? 1 : 0);
        if (h.ratchet_index != expected)
            throw SessionError("unexpected ratchet index on new remote ratchet key");
        if (!session.local_ratchet || session.local_ratchet->pair.secret.erased())
            throw SessionError("local ratchet secret unavailable for receive step");

        Key32 ratchet_dh = dh(session.local_ratchet->pair.secret, h.ratchet_public);
        RatchetStepKeys step = kdf_ratchet_step(session.root_key, ratchet_dh);
        session.root_key = step.root_key;
        session.recv_chain = ChainState{step.chain_key, h.ratchet_index, 0};
        session.remote_ratchet = h.ratchet_public;

        // The local ratchet secret is never used again: the next sending
        // chain is keyed by a fresh pair. Erase it right away.
        session.local_ratchet->pair.secret.erase();
        session.local_ratchet_spent = true;
        session.fs_restored = true;
    }

    if (!session.recv_chain) throw SessionError("no receiving chain");
    ChainState& chain = *session.recv_chain;
    if (h.ratchet_index != chain.ratchet_index) throw SessionError("stale ratchet index");
    if (h.message_index < chain.next_message_index)
        throw SessionError("message replayed or delivered out of order");
    while (chain.next_message_index < h.message_index) advance_chain(chain);  // skipped messages

    MessageKey mk = advance_chain(chain);
    std::optional<Bytes> plaintext =
        aead_decrypt(mk.key, envelope.payload, envelope.associated_data());
    if (!plaintext) throw AuthenticationError("message failed authentication");
    return *plaintext;
}

std::vector<OracleResult> compromise_oracle(const std::vector<Envelope>& recorded,
                                            const SecretKey& identity_dh_secret,
                                            const SecretKey& signed_prekey_secret) {
    if (identity_dh_secret.erased() || signed_prekey_secret.erased())
        throw std::invalid_argument("compromise oracle refuses erased secrets");

    struct ChainTrace {
        bool used_one_time_prekey = false;
        ChainState chain;
    };
    std::map<PublicKey, ChainTrace> chains;  // keyed by the initiator ratchet public

    std::vector<OracleResult> results;
    results.reserve(recorded.size());

    for (const Envelope& env : recorded) {
        const EnvelopeHeader& h = env.header;
        OracleResult result;

        if (h.handshake) {
            ChainTrace trace;
            if (h.handshake->one_time_prekey_id) {
                trace.used_one_time_prekey = true;
            } else {
                // Recompute the handshake mix from the compromised secrets
                // and the cleartext associated data alone.
                PublicKey initiator_dh_identity;
                bool ok = true;
                try {
                    initiator_dh_identity = identity_dh_public(h.initiator_identity);
                } catch (const std::invalid_argument&) {
                    ok = false;
                }
                if (ok) {
                    std::vector<Key32> parts;
                    parts.push_back(dh(signed_prekey_secret, initiator_dh_identity));
                    parts.push_back(dh(identity_dh_secret, h.handshake->ephemeral_public));
                    parts.push_back(dh(signed_prekey_secret, h.handshake->ephemeral_public));
                    Key32 rk0 = kdf_root_initial(concat_dh(parts));
                    Key32 ratchet_dh = dh(signed_prekey_secret, h.ratchet_public);
                    RatchetStepKeys step = kdf_ratchet_step(rk0, ratchet_dh);
                    trace.chain = ChainState{step.chain_key, 0, 0};
                }
            }
            chains[h.ratchet_public] = trace;
        }

        if (h.ratchet_index != 0) {
            result.outcome = OracleOutcome::RatchetProtected;
            results.push_back(std::move(result));
            continue;
        }

        auto it = chains.find(h.ratchet_public);
        if (it == chains.end()) {
            result.outcome = OracleOutcome::UnknownSession;
            results.push_back(std::move(result));
            continue;
        }
        if (it->second.used_one_time_prekey) {
            result.outcome = OracleOutcome::MissingOneTimeSecret;
            results.push_back(std::move(result));
            continue;
        }

        ChainState& chain = it->second.chain;
        if (h.message_index < chain.next_message_index) {
            result.outcome = OracleOutcome::AuthenticationFailed;
            results.push_back(std::move(result));
            continue;
        }
        while (chain.next_message_index < h.message_index) advance_chain(chain);
        MessageKey mk = advance_chain(chain);
        std::optional<Bytes> plaintext = aead_decrypt(mk.key, env.payload, env.associated_data());
        if (plaintext) {
            result.outcome = OracleOutcome::Decrypted;
            result.plaintext = std::move(*plaintext);
        } else {
            result.outcome = OracleOutcome::AuthenticationFailed;
        }
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace pksim::crypto
