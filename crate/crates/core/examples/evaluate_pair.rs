// Write a ground truth and a prediction as NIfTI files, read them back,
// validate them as binary masks and score the pair.

use ndsc::metrics::{evaluate_pair, MetricConfig};
use ndsc::volume::{
    as_binary_mask, read_nifti_file, write_nifti_file, BinaryMask, Volume,
    DEFAULT_BINARY_TOLERANCE,
};

pub fn run() -> ndsc::Result<()> {
    let dir = tempfile::tempdir()?;
    let dims = [8, 8, 4];
    let n = dims.iter().product::<usize>();

    // a 2x2x2 lesion in one corner; the prediction is shifted by one voxel
    let lesion = |x: usize, y: usize, z: usize| x < 2 && y < 2 && z < 2;
    let shifted = |x: usize, y: usize, z: usize| (1..3).contains(&x) && y < 2 && z < 2;
    let build = |f: &dyn Fn(usize, usize, usize) -> bool| {
        let bits = (0..n)
            .map(|i| f(i % dims[0], (i / dims[0]) % dims[1], i / (dims[0] * dims[1])))
            .collect();
        BinaryMask::new(dims, bits)
    };
    let gt_path = dir.path().join("gt.nii");
    let pred_path = dir.path().join("pred.nii");
    write_nifti_file(&Volume::from_mask(&build(&lesion)?), &gt_path)?;
    write_nifti_file(&Volume::from_mask(&build(&shifted)?), &pred_path)?;

    let gt = as_binary_mask(&read_nifti_file(&gt_path)?, DEFAULT_BINARY_TOLERANCE)?;
    let pred = as_binary_mask(&read_nifti_file(&pred_path)?, DEFAULT_BINARY_TOLERANCE)?;
    let m = evaluate_pair(&gt, &pred, &MetricConfig::default())?;
    println!("{}", serde_json::to_string_pretty(&m)?);
    Ok(())
}

fn main() -> ndsc::Result<()> {
    run()
}
