#pragma once

#include <gsl/gsl_errno.h>
#include <mutex>

namespace cbjj::detail {

// GSL's default handler aborts; every caller here checks status codes instead.
inline void quiet_gsl()
{
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace cbjj::detail
