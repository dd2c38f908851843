/*
 * (C) Copyright 2026 The ddvar Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ddvar/analysis.hpp"
#include "ddvar/geometry.hpp"
#include "ddvar/solvers.hpp"

namespace ddvar {

/// 17 significant digits, scientific ("%.16e"); the only float format in outputs.
std::string format_real(double x);

/**
 * Minimal JSON emitter with fixed float formatting, so files are byte-stable.
 * Non-finite reals are written as null.
 */
class JsonWriter {
 public:
  JsonWriter& begin_object(std::string_view key = {});
  JsonWriter& end_object();
  JsonWriter& begin_array(std::string_view key = {});
  JsonWriter& end_array();

  JsonWriter& field(std::string_view key, double value);
  JsonWriter& field(std::string_view key, long long value);
  JsonWriter& field(std::string_view key, unsigned long long value);
  JsonWriter& field(std::string_view key, int value) { return field(key, static_cast<long long>(value)); }
  JsonWriter& field(std::string_view key, long value) { return field(key, static_cast<long long>(value)); }
  JsonWriter& field(std::string_view key, unsigned long value) {
    return field(key, static_cast<unsigned long long>(value));
  }
  JsonWriter& field(std::string_view key, bool value);
  JsonWriter& field(std::string_view key, std::string_view value);
  JsonWriter& field(std::string_view key, const char* value) { return field(key, std::string_view(value)); }
  JsonWriter& field(std::string_view key, const Vector& values);
  JsonWriter& field(std::string_view key, const std::vector<double>& values);
  JsonWriter& field(std::string_view key, const std::vector<Index>& values);

  /// Array element (inside begin_array).
  JsonWriter& element(const Vector& values);

  std::string str() const { return out_ + "\n"; }

 private:
  void prefix(std::string_view key);
  JsonWriter& close(char bracket);
  void newline();

  std::string out_;
  std::vector<bool> first_;  // per open container: no element written yet
};

void write_decomposition(JsonWriter& w, const Decomposition& dec);

/// iter,max_delta,global_cost,res_sub_1..res_sub_J
std::string history_to_csv(const IterationHistory& history, std::size_t num_subdomains);

}  // namespace ddvar
