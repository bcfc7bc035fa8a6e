// Copyright 2026 The pipeline-attest Authors.
// Licensed under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

// Canonical JSON: UTF-8, object keys sorted, no insignificant whitespace,
// integers only. nlohmann::json objects are std::map-backed, so dump() with
// no indent already yields sorted, compact output; this layer rejects
// floating-point numbers.

#ifndef ATTEST_CANONICAL_JSON_H_
#define ATTEST_CANONICAL_JSON_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "attest/bytes.h"
#include "attest/error.h"
#include "attest/hash.h"

namespace attest {

using Json = nlohmann::json;

namespace detail {
inline void reject_floats(const Json& j) {
  if (j.is_number_float()) {
    throw Error(ErrorCode::kSchemaMismatch, "canonical JSON admits integers only");
  }
  if (j.is_structured()) {
    for (const Json& child : j) reject_floats(child);
  }
}
}  // namespace detail

inline std::string canonical_dump(const Json& j) {
  detail::reject_floats(j);
  return j.dump(-1, ' ', false, Json::error_handler_t::strict);
}

inline Bytes canonical_bytes(const Json& j) { return to_bytes(canonical_dump(j)); }

// Throws SchemaMismatch on malformed input.
inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("invalid JSON: ") + e.what());
  }
}
inline Json parse_json(ByteView bytes) { return parse_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())); }

// Typed field accessors that report schema errors instead of nlohmann's
// type_error.
inline const Json& json_field(const Json& obj, std::string_view key) {
  if (!obj.is_object()) throw Error(ErrorCode::kSchemaMismatch, "expected JSON object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw Error(ErrorCode::kSchemaMismatch, "missing field '" + std::string(key) + "'");
  return *it;
}

inline std::int64_t json_int(const Json& obj, std::string_view key) {
  const Json& v = json_field(obj, key);
  if (!v.is_number_integer()) throw Error(ErrorCode::kSchemaMismatch, "field '" + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::string json_string(const Json& obj, std::string_view key) {
  const Json& v = json_field(obj, key);
  if (!v.is_string()) throw Error(ErrorCode::kSchemaMismatch, "field '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

inline Digest json_digest(const Json& obj, std::string_view key) {
  try {
    return Digest::from_hex(json_string(obj, key));
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchemaMismatch, "field '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace attest

#endif  // ATTEST_CANONICAL_JSON_H_
