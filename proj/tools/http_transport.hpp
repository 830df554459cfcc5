#pragma once

#include <string>

#include "geotax/genome.hpp"

namespace geotax::tools {

// Live transport over cpp-httplib. Connection failures throw HttpError.
class HttpTransport : public ingest::Transport {
 public:
  explicit HttpTransport(int timeout_seconds = 30) : timeout_(timeout_seconds) {}
  ingest::HttpResponse get(const std::string& url) override;

 private:
  int timeout_;
};

}  // namespace geotax::tools
