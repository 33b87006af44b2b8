//! Registrable-domain extraction backed by a bundled public-suffix snapshot.

use std::sync::OnceLock;

use publicsuffix::{List, Psl};
use url::{Host, Url};

use crate::{Error, Result};

/// Snapshot bundled with the crate; provenance and trim policy are documented
/// in the file header. Suffixes missing from the snapshot fall back to the
/// implicit `*` rule, i.e. registrable domain = last two labels.
const SNAPSHOT: &[u8] = include_bytes!("../../data/public_suffix_snapshot.dat");

fn suffix_list() -> &'static List {
    static LIST: OnceLock<List> = OnceLock::new();
    LIST.get_or_init(|| List::from_bytes(SNAPSHOT).expect("bundled suffix snapshot parses"))
}

/// Registrable domain (public suffix plus one label) of an absolute URL,
/// lowercased. IP-address hosts are returned verbatim.
///
/// A host that is itself a public suffix (including single-label hosts) is
/// returned whole rather than rejected; such hosts have no label left of the
/// suffix and the host is the most specific name available.
pub fn registrable_domain(url: &str) -> Result<String> {
    let parsed = Url::parse(url).map_err(|e| Error::InvalidUrl {
        url: url.to_string(),
        reason: e.to_string(),
    })?;
    match parsed.host() {
        Some(Host::Ipv4(ip)) => Ok(ip.to_string()),
        Some(Host::Ipv6(ip)) => Ok(ip.to_string()),
        Some(Host::Domain(name)) => Ok(domain_of_host(name)),
        None => Err(Error::InvalidUrl {
            url: url.to_string(),
            reason: "URL has no host".to_string(),
        }),
    }
}

/// Registrable domain of an already-extracted DNS host name.
pub(crate) fn domain_of_host(host: &str) -> String {
    let host = host.trim_end_matches('.').to_ascii_lowercase();
    match suffix_list().domain(host.as_bytes()) {
        Some(d) => String::from_utf8_lossy(d.as_bytes()).into_owned(),
        // Host equals a suffix or is a single label: keep it whole.
        None => host,
    }
}
