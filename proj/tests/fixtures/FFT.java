public class FFT {
    // Constant-geometry radix-2 DIF; n = 2^logn. Output in natural order.
    public static void fft(double[] re, double[] im, int n, int logn) {
        int h = n >> 1;
        double[] tre = new double[n];
        double[] tim = new double[n];
        for (int s = 0; s < logn; s++) {
            for (int b = 0; b < h; b++) {
                double ang = -6.283185307179586 * ((b >> s) << s) / n;
                double wr = Math.cos(ang);
                double wi = Math.sin(ang);
                double ur = re[b];
                double ui = im[b];
                double vr = re[b + h];
                double vi = im[b + h];
                tre[2 * b] = ur + vr;
                tim[2 * b] = ui + vi;
                double dr = ur - vr;
                double di = ui - vi;
                tre[2 * b + 1] = dr * wr - di * wi;
                tim[2 * b + 1] = dr * wi + di * wr;
            }
            for (int k = 0; k < n; k++) {
                re[k] = tre[k];
                im[k] = tim[k];
            }
        }
        for (int k = 0; k < n; k++) {
            int r = 0;
            int kk = k;
            for (int bb = 0; bb < logn; bb++) {
                r = (r << 1) | (kk & 1);
                kk = kk >> 1;
            }
            tre[k] = re[r];
            tim[k] = im[r];
        }
        for (int k = 0; k < n; k++) {
            re[k] = tre[k];
            im[k] = tim[k];
        }
    }
}
