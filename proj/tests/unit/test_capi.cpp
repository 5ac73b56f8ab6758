// Copyright 2026 The ddoslab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exercises the C surface the way a foreign-language binding would: only the
// public header, plain arrays and opaque handles.
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ddoslab/ddoslab.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("ddoslab_capi_" + std::to_string(::getpid()));
  Scratch() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("metrics through the C API") {
  const double scores[] = {0.1, 0.4, 0.35, 0.8};
  const int labels[] = {0, 0, 1, 1};
  double auc = 0;
  REQUIRE(ddl_roc_auc(scores, labels, 4, &auc) == DDL_OK);
  CHECK(auc == 0.75);

  const int pred[] = {1, 1, 1, 0, 0};
  const int truth[] = {1, 1, 0, 1, 0};
  double f1 = 0;
  REQUIRE(ddl_f1(pred, truth, 5, &f1) == DDL_OK);
  CHECK(f1 == doctest::Approx(4.0 / 6.0).epsilon(1e-12));

  const double v[] = {0.2, 0.4};
  double q = 0;
  REQUIRE(ddl_quantile(v, 2, 0.5, &q) == DDL_OK);
  CHECK(q == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("errors come back as status codes with a message") {
  const double scores[] = {0.1, 0.2};
  const int labels[] = {0, 0};
  double out = 0;
  CHECK(ddl_roc_auc(scores, labels, 2, &out) != DDL_OK);
  CHECK(std::strlen(ddl_last_error()) > 0);
  CHECK(ddl_roc_auc(nullptr, labels, 2, &out) == DDL_INVALID_ARGUMENT);
  CHECK(ddl_set_log_level("loud") == DDL_INVALID_ARGUMENT);
  CHECK(ddl_set_log_level("error") == DDL_OK);
  ddl_table* t = nullptr;
  CHECK(ddl_table_read_csv("/nonexistent/x.csv", &t) == DDL_DATA_ERROR);
  CHECK(t == nullptr);
  ddl_cmd_options o;
  ddl_cmd_options_init(&o);
  CHECK(ddl_cmd_run("no-such-command", &o) == DDL_CONFIG_ERROR);
  o.config = "/nonexistent/config.json";
  CHECK(ddl_cmd_run("preprocess", &o) == DDL_CONFIG_ERROR);
  CHECK(std::strlen(ddl_version()) > 0);
}

TEST_CASE("table handle") {
  Scratch s;
  {
    std::ofstream out(s.path / "t.csv");
    out << "a,b,label\n1,2,benign\n3,4,ddos\n5,6,benign\n";
  }
  ddl_table* t = nullptr;
  REQUIRE(ddl_table_read_csv((s.path / "t.csv").c_str(), &t) == DDL_OK);
  CHECK(ddl_table_rows(t) == 3);
  CHECK(ddl_table_cols(t) == 2);
  int labels[3] = {9, 9, 9};
  REQUIRE(ddl_table_labels(t, labels, 3) == DDL_OK);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 1);
  CHECK(ddl_table_labels(t, labels, 2) == DDL_INVALID_ARGUMENT);
  ddl_table_free(t);
}

TEST_CASE("pipeline commands and detectors through the C API") {
  Scratch s;
  ddl_set_log_level("error");
  const auto toy = s.path / "toy";
  ddl_cmd_options o;
  ddl_cmd_options_init(&o);
  o.out = toy.c_str();
  o.has_seed = 1;
  o.seed = 2;
  REQUIRE(ddl_cmd_run("maketoy", &o) == DDL_OK);
  CHECK(std::strlen(ddl_cmd_last_fingerprint()) == 64);

  ddl_cmd_options_init(&o);
  const auto pre = (toy / "configs" / "preprocess.json").string();
  o.config = pre.c_str();
  REQUIRE(ddl_cmd_run("preprocess", &o) == DDL_OK);

  // One epoch keeps this quick; quality is not the point here.
  const auto cfg_path = toy / "configs" / "train_local_A.json";
  std::string text;
  {
    std::ifstream in(cfg_path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto at = text.find("\"epochs\": 50");
  REQUIRE(at != std::string::npos);
  text.replace(at, 12, "\"epochs\": 1");
  {
    std::ofstream out(cfg_path);
    out << text;
  }
  const auto train = cfg_path.string();
  o.config = train.c_str();
  REQUIRE_MESSAGE(ddl_cmd_run("train-local", &o) == DDL_OK, ddl_last_error());

  ddl_detector* d = nullptr;
  REQUIRE(ddl_detector_load((s.path / "models" / "local_A").c_str(), "A", &d) == DDL_OK);
  ddl_table* t = nullptr;
  REQUIRE(ddl_table_read_csv((s.path / "splits" / "A" / "test.csv").c_str(), &t) == DDL_OK);
  std::vector<double> scores(ddl_table_rows(t));
  REQUIRE(ddl_detector_score(d, t, scores.data(), scores.size()) == DDL_OK);
  for (double v : scores) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(ddl_detector_threshold(d) >= 0.0);
  CHECK(ddl_detector_score(d, t, scores.data(), scores.size() - 1) == DDL_INVALID_ARGUMENT);
  CHECK(ddl_detector_load((s.path / "models" / "local_A").c_str(), "Q", &d) != DDL_OK);
  ddl_table_free(t);
  ddl_detector_free(d);
}
