#include "http_transport.hpp"

#include <httplib.h>

#include "geotax/error.hpp"

namespace geotax::tools {

ingest::HttpResponse HttpTransport::get(const std::string& url) {
  const auto scheme_end = url.find("://");
  require(scheme_end != std::string::npos, ErrorCode::HttpError, "malformed URL " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  httplib::Client client(origin);
  client.set_connection_timeout(timeout_, 0);
  client.set_read_timeout(timeout_, 0);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) fail(ErrorCode::HttpError, "request to " + origin + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace geotax::tools
