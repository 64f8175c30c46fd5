// Round trip a volume through every supported datatype and both byte orders.

use ndsc::volume::{
    read_nifti, write_nifti_with_order, ByteOrder, Datatype, Volume, VolumeHeader, HEADER_SIZE,
    VOX_OFFSET,
};

pub fn run() -> ndsc::Result<()> {
    let dims = [4, 3, 2];
    for dt in Datatype::ALL {
        let mut header = VolumeHeader::new(dims, dt);
        header.voxel_spacing = [0.8, 0.8, 3.0];
        let data = (0..24).map(|i| i as f64).collect();
        let v = Volume::new(header, data)?;
        for order in [ByteOrder::Little, ByteOrder::Big] {
            let mut bytes = Vec::new();
            write_nifti_with_order(&v, &mut bytes, order)?;
            let back = read_nifti(&bytes[..])?;
            assert_eq!(back, v);
            println!(
                "{:<8?} {:<6?} {} bytes (header {HEADER_SIZE}, data at {VOX_OFFSET}), round trip ok",
                dt,
                order,
                bytes.len()
            );
        }
    }
    Ok(())
}

fn main() -> ndsc::Result<()> {
    run()
}
