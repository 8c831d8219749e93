#pragma once

#include "tgia/types.hpp"

#include <string>
#include <vector>

namespace tgia {

enum class EncoderKind { hashed_tfidf, precomputed };

/// hashed_tfidf maps tokens to `dim` buckets via 64-bit FNV-1a; precomputed
/// reads a fixed embedding matrix from `path`.
struct EncoderSpec {
  EncoderKind kind = EncoderKind::hashed_tfidf;
  int dim = 128;      // hashed_tfidf only, must be >= 8
  std::string path;   // precomputed only
};

/// Lowercased alphanumeric token runs.
std::vector<std::string> tokenize(const std::string& text);

/// 64-bit FNV-1a of a token.
std::uint64_t fnv1a64(const std::string& token);

/// Encodes texts into an N x D feature matrix. hashed_tfidf rows are term
/// frequencies over hash buckets, L2-normalized when nonzero; precomputed
/// returns the file's rows verbatim. Pure function of (texts, spec).
EmbeddingMatrix encode(const std::vector<std::string>& texts,
                       const EncoderSpec& spec);

/// Single-text encoding, consistent with the row encode() would produce.
/// Throws for precomputed specs, which cannot embed unseen text.
Vector encode_one(const std::string& text, const EncoderSpec& spec);

/// Writes a matrix in the precomputed format: a "N D" header line then N
/// rows of D decimal floats.
void save_embedding_csv(const EmbeddingMatrix& matrix,
                        const std::string& path);

}  // namespace tgia
