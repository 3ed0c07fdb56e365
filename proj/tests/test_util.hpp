#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "ap/corpus.hpp"
#include "ap/util.hpp"

namespace test_util {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string templ = (std::filesystem::temp_directory_path() / "ap_test_XXXXXX").string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
    path_ = templ;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return path_ + "/" + name; }
  const std::string& path() const { return path_; }

  std::string write(const std::string& name, const std::string& content) const {
    std::string p = file(name);
    ap::write_file(p, content);
    return p;
  }

 private:
  std::string path_;
};

inline ap::QaInstance make_instance(const std::string& qid, const std::string& question,
                                    const std::string& gold, ap::Split split,
                                    const std::string& image_id = "") {
  ap::QaInstance inst;
  inst.qid = qid;
  inst.image_id = image_id.empty() ? "img_" + qid : image_id;
  inst.question = question;
  inst.answers.assign(10, gold);
  inst.split = split;
  return inst;
}

inline void add_instance(ap::Corpus& corpus, ap::QaInstance inst) {
  corpus.by_qid.emplace(inst.qid, corpus.instances.size());
  corpus.instances.push_back(std::move(inst));
}

}  // namespace test_util
