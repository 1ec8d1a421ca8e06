//! Protocol core for a crowd-sourced offline device-finding network.
//!
//! * [`keys`] derives the rolling P-224 advertisement key chain from a
//!   master beacon key and maps wall-clock time onto 15-minute key windows.
//! * [`advert`] packs an advertisement key into a 37-byte BLE frame.
//! * [`report`] and [`location`] implement finder-side ECIES encryption of
//!   location messages and the 88-byte report layout.
//! * [`wire`] holds the submit/fetch request and response formats.
//! * [`store`] is the in-memory report server used by the HTTP service and
//!   the simulator, including the metadata correlation analysis.

pub mod advert;
pub mod cache;
pub mod clock;
pub mod endpoint;
pub mod kdf;
pub mod keys;
pub mod location;
pub mod report;
pub mod store;
pub mod time;
pub mod wire;

pub use advert::{decode_advert, encode_advert, is_offline_finding, AdvertPayloadFields, BleFrame};
pub use keys::{
    generate_master, key_at, keys_in_window, AdvertisementKeyPair, KeyChain, KeyId, MasterBeaconKey,
};
pub use location::LocationMessage;
pub use report::{decrypt_report, encrypt_report, EncryptedReport};
pub use store::{CorrelationFinding, ReportStore, StoreConfig, StoredReport};
