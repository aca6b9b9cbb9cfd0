#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace lexalign::jsonx {

using Json = nlohmann::ordered_json;

// Schema accessors that fail with a field path ("rulings[3].year: expected
// integer") wrapped in the caller's error type E.
template <class E>
const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw E(path + ": expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw E(path + "." + key + ": required");
  return *it;
}

template <class E>
std::string require_string(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = require<E>(obj, key, path);
  if (!v.is_string()) throw E(path + "." + key + ": expected string");
  return v.get<std::string>();
}

template <class E>
std::int64_t require_int(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = require<E>(obj, key, path);
  if (!v.is_number_integer()) throw E(path + "." + key + ": expected integer");
  return v.get<std::int64_t>();
}

template <class E>
double require_number(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = require<E>(obj, key, path);
  if (!v.is_number()) throw E(path + "." + key + ": expected number");
  return v.get<double>();
}

template <class E>
const Json& require_array(const Json& obj, const std::string& key, const std::string& path) {
  const Json& v = require<E>(obj, key, path);
  if (!v.is_array()) throw E(path + "." + key + ": expected array");
  return v;
}

template <class E>
Json parse(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw E(what + ": not valid JSON");
  return j;
}

template <class E>
void require_schema_version(const Json& obj, int expected, const std::string& what) {
  std::int64_t v = require_int<E>(obj, "schema_version", what);
  if (v != expected)
    throw E(what + ".schema_version: expected " + std::to_string(expected) + ", got " +
            std::to_string(v));
}

}  // namespace lexalign::jsonx
