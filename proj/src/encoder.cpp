#include "tgia/encoder.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tgia {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      current.push_back(static_cast<char>(std::tolower(ch)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t fnv1a64(const std::string& token) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : token) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

void validate_spec(const EncoderSpec& spec) {
  if (spec.kind == EncoderKind::hashed_tfidf && spec.dim < 8)
    throw std::invalid_argument("hashed_tfidf dim must be >= 8");
  if (spec.kind == EncoderKind::precomputed && spec.path.empty())
    throw std::invalid_argument("precomputed encoder needs a path");
}

void encode_hashed_row(const std::string& text, int dim,
                       Eigen::Ref<Eigen::RowVectorXd> row) {
  row.setZero();
  for (const auto& token : tokenize(text))
    row[static_cast<Eigen::Index>(fnv1a64(token) %
                                  static_cast<std::uint64_t>(dim))] += 1.0;
  const double norm = row.norm();
  if (norm > 0.0) row /= norm;
}

EmbeddingMatrix load_precomputed(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file " + path);
  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error(path + ": empty embedding file");
  std::istringstream hs(header);
  long rows = 0, cols = 0;
  if (!(hs >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error(path + ": expected \"N D\" header");
  EmbeddingMatrix matrix(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double value = 0.0;
      if (!(in >> value))
        throw std::runtime_error(path + ": embedding row " +
                                 std::to_string(r) + " is short or malformed");
      if (!std::isfinite(value))
        throw std::runtime_error(path + ": non-finite value at row " +
                                 std::to_string(r));
      matrix(r, c) = value;
    }
  }
  return matrix;
}

}  // namespace

EmbeddingMatrix encode(const std::vector<std::string>& texts,
                       const EncoderSpec& spec) {
  validate_spec(spec);
  if (texts.empty()) throw std::invalid_argument("empty text sequence");
  if (spec.kind == EncoderKind::precomputed) {
    EmbeddingMatrix all = load_precomputed(spec.path);
    if (all.rows() < static_cast<Eigen::Index>(texts.size()))
      throw std::runtime_error(
          spec.path + ": embedding file has " + std::to_string(all.rows()) +
          " rows but " + std::to_string(texts.size()) + " texts were given");
    return all.topRows(static_cast<Eigen::Index>(texts.size()));
  }
  EmbeddingMatrix matrix(static_cast<Eigen::Index>(texts.size()), spec.dim);
  for (std::size_t i = 0; i < texts.size(); ++i)
    encode_hashed_row(texts[i], spec.dim,
                      matrix.row(static_cast<Eigen::Index>(i)));
  return matrix;
}

Vector encode_one(const std::string& text, const EncoderSpec& spec) {
  validate_spec(spec);
  if (spec.kind == EncoderKind::precomputed)
    throw std::runtime_error(
        "precomputed encoder cannot embed unseen text; generated candidates "
        "require hashed_tfidf or an external embedding service");
  Eigen::RowVectorXd row(spec.dim);
  encode_hashed_row(text, spec.dim, row);
  return row.transpose();
}

void save_embedding_csv(const EmbeddingMatrix& matrix,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  out.precision(17);
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c) out << ' ';
      out << matrix(r, c);
    }
    out << '\n';
  }
}

}  // namespace tgia
