// trace_io.hpp -- RSS trace CSV with sidecar JSON metadata.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef POF_TRACE_IO_HPP
#define POF_TRACE_IO_HPP

#include <string>

#include "pof/channel.hpp"

namespace pof {

// CSV header `t_s,rss_db`; sidecar `<path>.meta.json` holds
// {rate_hz, vehicle_id, start_t_s}.
void save_trace_csv(const RssTrace& trace, const std::string& path);
RssTrace load_trace_csv(const std::string& path);

}  // namespace pof

#endif  // POF_TRACE_IO_HPP
