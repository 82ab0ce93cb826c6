// Git-style content hashing for input provenance in run reports.
#pragma once

#include <string>

namespace rns::hash {

/// SHA-1 of the given bytes, lowercase hex.
std::string sha1_hex(const std::string& bytes);

/// Git blob hash: sha1("blob <size>\0" + content).
std::string git_blob_hash(const std::string& content);

} // namespace rns::hash
