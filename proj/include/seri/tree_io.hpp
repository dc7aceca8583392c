#ifndef SERI_TREE_IO_HPP
#define SERI_TREE_IO_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seri/errors.hpp"
#include "seri/growth.hpp"
#include "seri/tree_record.hpp"

// Tree serialization.
//
// CSV:    header "vertex,parent", one row per vertex v >= 1.
// Binary: 16-byte header = "SERI-TREE\0" (10 bytes) + version byte + 5 zero
//         bytes, followed by parent[1..n] as little-endian uint64.
// Every tree file has a JSON sidecar manifest
//         {format_version, delta, n, seed, sampler, convention}.

namespace seri::io {

inline constexpr std::uint8_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryHeaderSize = 16;
inline constexpr char kBinaryMagic[10] = {'S', 'E', 'R', 'I', '-', 'T', 'R', 'E', 'E', '\0'};
inline constexpr const char* kTreeFormatVersion = "1";

inline void write_tree_csv(std::ostream& os, const TreeRecord& tree) {
  os << "vertex,parent\n";
  for (std::uint64_t m = 1; m <= tree.n(); ++m) os << m << ',' << tree.parent(m) << '\n';
}

inline TreeRecord read_tree_csv(std::istream& is, double delta) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "empty tree CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "vertex,parent", "tree CSV must start with header 'vertex,parent'");
  std::vector<Vertex> parents;
  std::uint64_t expected = 1;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream row(line);
    std::uint64_t v = 0, p = 0;
    char comma = 0;
    require(static_cast<bool>(row >> v >> comma >> p) && comma == ',', "malformed tree CSV row: " + line);
    require(v == expected, "tree CSV rows must list vertices 1..n in order");
    parents.push_back(static_cast<Vertex>(p));
    ++expected;
  }
  return TreeRecord::from_parents(delta, parents);
}

inline void write_tree_binary(std::ostream& os, const TreeRecord& tree) {
  std::array<char, kBinaryHeaderSize> header{};
  std::memcpy(header.data(), kBinaryMagic, sizeof(kBinaryMagic));
  header[10] = static_cast<char>(kBinaryVersion);
  os.write(header.data(), header.size());
  for (std::uint64_t m = 1; m <= tree.n(); ++m) {
    std::uint64_t p = tree.parent(m);
    std::array<char, 8> bytes{};
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((p >> (8 * b)) & 0xff);
    os.write(bytes.data(), bytes.size());
  }
}

inline TreeRecord read_tree_binary(std::istream& is, double delta) {
  std::array<char, kBinaryHeaderSize> header{};
  is.read(header.data(), header.size());
  require(is.gcount() == static_cast<std::streamsize>(header.size()), "binary tree file too short");
  require(std::memcmp(header.data(), kBinaryMagic, sizeof(kBinaryMagic)) == 0, "bad binary tree magic");
  require(static_cast<std::uint8_t>(header[10]) == kBinaryVersion, "unsupported binary tree version");
  std::vector<Vertex> parents;
  std::array<char, 8> bytes{};
  while (is.read(bytes.data(), bytes.size())) {
    std::uint64_t p = 0;
    for (int b = 0; b < 8; ++b) p |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    parents.push_back(static_cast<Vertex>(p));
  }
  require(is.gcount() == 0, "binary tree payload is not a multiple of 8 bytes");
  return TreeRecord::from_parents(delta, parents);
}

inline nlohmann::json tree_manifest(const GrowthParams& p, std::uint64_t n) {
  return nlohmann::json{{"format_version", kTreeFormatVersion},
                        {"delta", p.delta},
                        {"n", n},
                        {"seed", p.seed},
                        {"sampler", to_string(p.sampler)},
                        {"convention", to_string(p.convention)}};
}

inline GrowthParams params_from_manifest(const nlohmann::json& j) {
  GrowthParams p;
  p.delta = j.at("delta").get<double>();
  p.n_final = j.at("n").get<std::uint64_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.sampler = parse_sampler(j.at("sampler").get<std::string>());
  p.convention = parse_convention(j.at("convention").get<std::string>());
  return p;
}

}  // namespace seri::io

#endif  // SERI_TREE_IO_HPP
