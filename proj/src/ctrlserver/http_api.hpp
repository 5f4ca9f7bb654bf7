#pragma once

#include <memory>
#include <string>

#include "ctrlserver/server.hpp"

namespace digirr::ctrlserver {

// HTTP front end for a ControlServer.
//
//   POST /api/login            {"user","password"} -> {"token","expires_in"}
//   POST /api/logout           -> 204
//   GET  /api/status-table     -> status window rows
//   GET  /api/control-table    -> control window rows
//   POST /api/command          {"device","command","duration_s"?,"target"?} -> 202 envelope
//   GET  /api/commands         -> command ledger
//   GET  /api/commands/{id}    -> one envelope
//   POST /api/schedule         {"actuator","start_time_of_day","duration_s"} -> 202 envelope (admin)
//   GET  /api/history?sensor=&from=&to=  -> text/csv
//   GET  /api/events           -> text/event-stream
//   GET  /api/health           -> {"ok":true}
//
// Everything except login and health needs "Authorization: Bearer <token>"
// (the event stream also accepts ?token=). Status codes: 400 validation,
// 401 missing/bad/expired session or wrong role, 404 unknown, 423 locked out.
class HttpApi {
public:
  explicit HttpApi(ControlServer& server);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Binds; returns the bound port, or -1 if the port is unavailable.
  // port 0 picks a free one.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after a successful bind.
  void run();
  void stop();
  bool running() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace digirr::ctrlserver
